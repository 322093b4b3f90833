"""Finite-outcome POVMs and their Naimark dilations.

The canonical dilation lives in ``K = C^m (x) C^dim`` with

    W f   = sum_i |i> (x) M_i^{1/2} f
    E_i   = |i><i| (x) I

so that ``W^dag E_i W = M_i``. The minimal dilation compresses ``K`` to the
span of the columns of all ``E_i W``, which is ``sum_i rank(M_i)``
dimensional.

Restricting ``E(B) = sum_{i in B} E_i`` to ``H`` gives the error operators
``V_B = E(B) W``. Since ``E(B) E(B') = E(B & B')``,

    V_B^dag V_B' = W^dag E(B & B') W = M(B & B'),

so the errors ``rho -> E(B) rho E(B)`` generate exactly the POVM graph.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from .core import (
    DEFAULT_TOL,
    PreconditionError,
    as_cmatrix,
    dagger,
    herm_eig,
    hs_norm,
    psd_power,
)
from .formats import FormatError, matrix_from_json, matrix_to_json
from .graphs import graph_from_generators, graph_from_povm, graphs_equal
from .report import Report, Timer

__all__ = [
    "Povm",
    "NaimarkDilation",
    "random_povm",
    "dilate",
    "subset_isometry",
    "subset_element",
    "verify_proposition1",
    "povm_to_json",
    "povm_from_json",
    "dilation_to_json",
]

POVM_TOL = 1e-9
# dilation identities hold to rounding; looser than this means a bug
INVARIANT_TOL = 1e-10


@dataclass(frozen=True)
class Povm:
    dim: int
    elements: List[np.ndarray]

    def __post_init__(self):
        if not self.elements:
            raise ValueError("a POVM needs at least one outcome")
        els = [as_cmatrix(m, "POVM element") for m in self.elements]
        for i, m in enumerate(els):
            if m.shape != (self.dim, self.dim):
                raise ValueError(f"POVM element {i} has shape {m.shape}, expected {(self.dim,) * 2}")
            herm = hs_norm(m - dagger(m))
            if herm > POVM_TOL:
                raise PreconditionError(f"POVM element {i} is not Hermitian (residual {herm:.3e})")
            low = float(np.linalg.eigvalsh(0.5 * (m + dagger(m)))[0])
            if low < -POVM_TOL:
                raise PreconditionError(f"POVM element {i} is not PSD (min eigenvalue {low:.3e})")
        total = hs_norm(sum(els) - np.eye(self.dim))
        if total > POVM_TOL:
            raise PreconditionError(f"POVM elements do not sum to identity (residual {total:.3e})")
        object.__setattr__(self, "elements", els)

    @property
    def outcomes(self):
        return len(self.elements)

    def ranks(self, tol=DEFAULT_TOL):
        out = []
        for m in self.elements:
            lam = np.linalg.eigvalsh(0.5 * (m + dagger(m)))
            out.append(int(np.sum(lam > tol.rank_tol * max(1.0, float(lam[-1])))))
        return out


@dataclass(frozen=True)
class NaimarkDilation:
    dimH: int
    dimK: int
    W: np.ndarray
    E: List[np.ndarray]
    minimal: bool
    povm: Povm

    def invariant_residuals(self):
        """Isometry, completeness, orthogonality and compression residuals."""
        W, E = self.W, self.E
        iso = hs_norm(dagger(W) @ W - np.eye(self.dimH))
        total = hs_norm(sum(E) - np.eye(self.dimK))
        orth = 0.0
        for i, Ei in enumerate(E):
            for j, Ej in enumerate(E):
                target = Ei if i == j else 0.0
                orth = max(orth, hs_norm(Ei @ Ej - target))
        comp = max(
            hs_norm(dagger(W) @ Ei @ W - Mi) for Ei, Mi in zip(E, self.povm.elements)
        )
        return {"isometry": iso, "completeness": total, "orthogonality": orth, "compression": comp}


def random_povm(dim, outcomes, seed):
    """Seeded random POVM ``M_i = S^{-1/2} A_i A_i^dag S^{-1/2}``.

    ``A_i`` are i.i.d. complex Gaussian and ``S = sum_j A_j A_j^dag``. A
    numerically singular ``S`` moves on to the next seed.
    """
    if dim < 1 or outcomes < 1:
        raise ValueError("dim and outcomes must be positive")
    s = seed
    for _ in range(100):
        rng = np.random.default_rng(s)
        A = rng.normal(size=(outcomes, dim, dim)) + 1j * rng.normal(size=(outcomes, dim, dim))
        G = A @ dagger(A)
        S = G.sum(axis=0)
        if np.linalg.cond(S) < 1e10:
            break
        s += 1
    else:
        raise RuntimeError(f"no well-conditioned POVM found from seed {seed}")
    R = psd_power(S, -0.5)
    elements = []
    for g in G:
        m = R @ g @ R
        elements.append(0.5 * (m + dagger(m)))
    return Povm(dim=dim, elements=elements)


def dilate(p, minimal=False, tol=DEFAULT_TOL):
    m, n = p.outcomes, p.dim
    if not minimal:
        W = np.concatenate([psd_power(M, 0.5, tol) for M in p.elements], axis=0)
        E = []
        for i in range(m):
            e = np.zeros((m * n, m * n), dtype=np.complex128)
            e[i * n:(i + 1) * n, i * n:(i + 1) * n] = np.eye(n)
            E.append(e)
        return NaimarkDilation(dimH=n, dimK=m * n, W=W, E=E, minimal=False, povm=p)

    # Columns of E_i W span |i> (x) range(M_i); an eigenbasis of each M_i gives
    # an orthonormal basis of that block, and W compresses to sqrt(lam) v^dag.
    rows = []
    labels = []
    for i, M in enumerate(p.elements):
        lam, V = herm_eig(M, tol)
        keep = lam > tol.rank_tol * max(1.0, float(lam[-1]))
        for a in np.flatnonzero(keep):
            rows.append(np.sqrt(lam[a]) * V[:, a].conj())
            labels.append(i)
    W = np.array(rows, dtype=np.complex128).reshape(len(rows), n)
    labels = np.array(labels)
    E = [np.diag((labels == i).astype(np.complex128)) for i in range(m)]
    return NaimarkDilation(dimH=n, dimK=len(rows), W=W, E=E, minimal=True, povm=p)


def _check_subset(d, B):
    B = sorted(set(int(b) for b in B))
    for b in B:
        if not 0 <= b < len(d.E):
            raise ValueError(f"outcome index {b} out of range for {len(d.E)} outcomes")
    return B


def subset_isometry(d, B):
    """``V_B = E(B) W`` as a ``dimK x dimH`` matrix."""
    B = _check_subset(d, B)
    EB = np.zeros((d.dimK, d.dimK), dtype=np.complex128)
    for b in B:
        EB += d.E[b]
    return EB @ d.W


def subset_element(p, B):
    """``M(B) = sum_{i in B} M_i``; zero for the empty set."""
    out = np.zeros((p.dim, p.dim), dtype=np.complex128)
    for b in B:
        out += p.elements[b]
    return out


def _default_subsets(m, seed, extra=10):
    rng = np.random.default_rng(seed)
    subsets = [frozenset([i]) for i in range(m)]
    for _ in range(extra):
        mask = rng.random(m) < 0.5
        subsets.append(frozenset(int(i) for i in np.flatnonzero(mask)))
    return subsets


def verify_proposition1(p, subsets=None, seed=0, tol=DEFAULT_TOL):
    """Check that the dilation errors ``E(B) rho E(B)`` generate the POVM graph.

    Both the canonical and the minimal dilation are checked; their product
    spans must agree with each other and with ``span{M_i}``.
    """
    with Timer() as timer:
        if subsets is None:
            subsets = _default_subsets(p.outcomes, seed)
        subsets = [frozenset(s) for s in subsets]
        if not subsets:
            raise ValueError("need at least one subset")
        g_povm = graph_from_povm(p, tol)
        residuals = {}
        dims = {}
        graphs = {}
        for label, minimal in (("canonical", False), ("minimal", True)):
            d = dilate(p, minimal=minimal, tol=tol)
            V = {s: subset_isometry(d, s) for s in subsets}
            worst = 0.0
            products = []
            for s in subsets:
                for s2 in subsets:
                    prod = dagger(V[s]) @ V[s2]
                    worst = max(worst, hs_norm(prod - subset_element(p, s & s2)))
                    products.append(prod)
            nonzero = [x for x in products if hs_norm(x) > 0.0]
            g_err = graph_from_generators(nonzero or [np.zeros((p.dim, p.dim))], tol)
            graphs[label] = g_err
            _, gres = graphs_equal(g_povm, g_err, tol)
            inv = d.invariant_residuals()
            residuals[f"{label}_product"] = worst
            residuals[f"{label}_graph"] = gres
            for k, v in inv.items():
                residuals[f"{label}_{k}"] = v
            dims[label] = d.dimK
        _, cross = graphs_equal(graphs["canonical"], graphs["minimal"], tol)
        residuals["dilation_independence"] = cross
    eq = tol.eq_tol
    thresholds = {
        "canonical_product": eq,
        "canonical_graph": eq,
        "minimal_product": eq,
        "minimal_graph": eq,
        "dilation_independence": eq,
    }
    for label in ("canonical", "minimal"):
        for k in ("isometry", "completeness", "orthogonality", "compression"):
            thresholds[f"{label}_{k}"] = INVARIANT_TOL
    return Report(
        check="prop1",
        parameters={
            "dim": p.dim,
            "outcomes": p.outcomes,
            "subsets": [sorted(s) for s in subsets],
            "graph_size": g_povm.size,
            "rank_sum": int(sum(p.ranks(tol))),
        },
        residuals=residuals,
        thresholds=thresholds,
        tables={"dimK": dims},
        runtime_ms=timer.ms,
    )


def povm_to_json(p):
    return {"dim": p.dim, "elements": [matrix_to_json(m) for m in p.elements]}


def povm_from_json(obj):
    if not isinstance(obj, dict):
        raise FormatError("povm: expected an object")
    dim = obj.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise FormatError(f"povm: field 'dim' must be a positive integer, got {dim!r}")
    els = obj.get("elements")
    if not isinstance(els, list) or not els:
        raise FormatError("povm: field 'elements' must be a nonempty list")
    mats = [matrix_from_json(m, f"povm.elements[{i}]") for i, m in enumerate(els)]
    for i, m in enumerate(mats):
        if m.shape != (dim, dim):
            raise FormatError(f"povm: field 'elements[{i}]' has shape {m.shape}, expected {(dim, dim)}")
    try:
        return Povm(dim=dim, elements=mats)
    except PreconditionError as exc:
        raise FormatError(f"povm: {exc}") from exc


def dilation_to_json(d):
    return {
        "dimH": d.dimH,
        "dimK": d.dimK,
        "minimal": d.minimal,
        "W": matrix_to_json(d.W),
        "E": [matrix_to_json(e) for e in d.E],
    }
