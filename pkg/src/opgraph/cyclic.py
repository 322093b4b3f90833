"""Covariant constructions on the cyclic group Z_n.

The computational basis ``e_j`` and the Fourier basis
``f_k = n^{-1/2} sum_s exp(-2 pi i k s / n) e_s`` are mutually unbiased. With
this sign the Fourier-diagonal unitaries shift the computational projections
forward: ``Uhat_j E_k Uhat_j^dag = E_{k+j}``.

All index arithmetic is mod n.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from .core import DEFAULT_TOL, dagger, hs_norm, op_norm, span_rank
from .graphs import KrausSet, graph_from_generators, graph_from_kraus, graph_from_povm, graphs_equal
from .naimark import Povm
from .report import Report, Timer

__all__ = [
    "CyclicModel",
    "BellBasis",
    "build_cyclic_model",
    "covariance_residual",
    "corollary1_build",
    "bell_basis",
    "repre_generators",
    "group_law_residual",
    "phase_rotation",
    "q_projections",
    "corollary2_verify",
]


def _omega(n):
    return np.exp(2j * np.pi / n)


@dataclass(frozen=True)
class CyclicModel:
    n: int
    e_basis: np.ndarray
    f_basis: np.ndarray
    U: List[np.ndarray]
    U_hat: List[np.ndarray]
    E: List[np.ndarray]


def build_cyclic_model(n):
    if n < 2:
        raise ValueError("n must be at least 2")
    w = _omega(n)
    idx = np.arange(n)
    e = np.eye(n, dtype=np.complex128)
    f = w ** (-np.outer(idx, idx)) / np.sqrt(n)  # column k is f_k
    U = [np.diag(w ** (j * idx)) for j in range(n)]
    U_hat = [(f * w ** (j * idx)) @ dagger(f) for j in range(n)]
    E = [np.outer(e[:, j], e[:, j]) for j in range(n)]
    return CyclicModel(n=n, e_basis=e, f_basis=f, U=U, U_hat=U_hat, E=E)


def covariance_residual(model):
    n = model.n
    return max(
        hs_norm(model.U_hat[j] @ model.E[k] @ dagger(model.U_hat[j]) - model.E[(k + j) % n])
        for j in range(n)
        for k in range(n)
    )


def unbiasedness_residual(model):
    overlaps = np.abs(dagger(model.e_basis) @ model.f_basis) ** 2
    return float(np.abs(overlaps - 1.0 / model.n).max())


def corollary1_build(n, tol=DEFAULT_TOL):
    """Graph, POVM and report for the compression to ``H = f^perp``.

    ``f`` is the uniform vector, i.e. the zeroth Fourier vector, so the other
    Fourier vectors give an isometry ``J`` onto ``H``.
    """
    with Timer() as timer:
        model = build_cyclic_model(n)
        J = model.f_basis[:, 1:]
        f = model.f_basis[:, 0]
        dimH = n - 1
        graph = graph_from_generators([dagger(J) @ u @ J for u in model.U], tol)
        povm = Povm(dim=dimH, elements=[dagger(J) @ E @ J for E in model.E])
        kraus = KrausSet([u @ J / np.sqrt(n) for u in model.U], channel=True)
        g_povm = graph_from_povm(povm, tol)
        g_err = graph_from_kraus(kraus, tol)
        _, res_povm = graphs_equal(graph, g_povm, tol)
        _, res_err = graphs_equal(graph, g_err, tol)
        residuals = {
            "covariance": covariance_residual(model),
            "unbiasedness": unbiasedness_residual(model),
            "f_norm": abs(np.linalg.norm(f) - 1.0),
            "isometry": hs_norm(dagger(J) @ J - np.eye(dimH)),
            "f_orthogonal": float(np.abs(dagger(J) @ f).max()),
            "povm_completeness": hs_norm(sum(povm.elements) - np.eye(dimH)),
            "graph_vs_povm": res_povm,
            "graph_vs_errors": res_err,
        }
    notes = []
    if n == 2:
        notes.append("degenerate: dim H = 1, every graph is span{1}")
    eq = tol.eq_tol
    report = Report(
        check="corollary1",
        parameters={"n": n, "dimH": dimH, "graph_size": graph.size},
        residuals=residuals,
        thresholds={k: eq for k in residuals},
        notes=notes,
        runtime_ms=timer.ms,
    )
    return graph, povm, report


@dataclass(frozen=True)
class BellBasis:
    n: int
    vectors: np.ndarray  # vectors[j, k] is eta_j^k in C^n (x) C^n

    def gram(self):
        flat = self.vectors.reshape(self.n * self.n, -1)
        return flat.conj() @ flat.T


def bell_basis(n):
    """``eta_j^k = n^{-1/2} sum_s omega^{s j} |s, s-k>``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    w = _omega(n)
    vec = np.zeros((n, n, n * n), dtype=np.complex128)
    for j in range(n):
        for k in range(n):
            for s in range(n):
                vec[j, k, s * n + (s - k) % n] += w ** (s * j) / np.sqrt(n)
    return BellBasis(n=n, vectors=vec)


def repre_generators(n):
    """``U_j = sum_{k,l} |eta_{k+j}^l><eta_k^l|`` for j in Z_n."""
    b = bell_basis(n)
    out = []
    for j in range(n):
        u = np.zeros((n * n, n * n), dtype=np.complex128)
        for k in range(n):
            for l in range(n):
                u += np.outer(b.vectors[(k + j) % n, l], b.vectors[k, l].conj())
        out.append(u)
    return out


def group_law_residual(gens):
    n = len(gens)
    dim = gens[0].shape[0]
    unit = max(hs_norm(dagger(u) @ u - np.eye(dim)) for u in gens)
    law = max(
        hs_norm(gens[j] @ gens[m] - gens[(j + m) % n]) for j in range(n) for m in range(n)
    )
    ident = hs_norm(gens[0] - np.eye(dim))
    return {"unitarity": unit, "group_law": law, "identity": ident}


def phase_rotation(n, phi):
    """``Uhat_phi |j, k> = exp(i phi j) |j, k>``."""
    return np.diag(np.repeat(np.exp(1j * phi * np.arange(n)), n))


def q_projections(n, reading):
    """The projections ``Q_j`` under the chosen reading.

    ``literal``: ``Q_j = sum_k |j, j-k><j, j-k|``, i.e. ``|j><j| (x) I``.
    ``bell``: ``Q_j = sum_k |eta_j^k><eta_j^k|``.
    """
    if reading == "literal":
        out = []
        for j in range(n):
            q = np.zeros((n * n, n * n), dtype=np.complex128)
            for k in range(n):
                i = j * n + (j - k) % n
                q[i, i] = 1.0
            out.append(q)
        return out
    if reading == "bell":
        b = bell_basis(n)
        return [sum(np.outer(b.vectors[j, k], b.vectors[j, k].conj()) for k in range(n)) for j in range(n)]
    raise ValueError(f"unknown reading {reading!r}; expected 'literal' or 'bell'")


def corollary2_verify(n, reading="bell", phi_samples=None, tol=DEFAULT_TOL):
    """Record whether the phase-orbit graphs coincide and match the generator span.

    The phase dependence of ``Uhat_phi Q_j Uhat_phi^dag`` is a trigonometric
    polynomial of degree at most n-1, so ``2n-1`` uniform samples see all of it.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if phi_samples is None:
        phi_samples = 2 * n - 1
    if phi_samples < 2 * n - 1:
        raise ValueError(f"phi_samples must be at least 2n-1 = {2 * n - 1}")
    with Timer() as timer:
        phis = 2 * np.pi * np.arange(phi_samples) / phi_samples
        rots = [phase_rotation(n, phi) for phi in phis]
        Q = q_projections(n, reading)
        graphs = []
        orbit_ranks = []
        for q in Q:
            orbit = [r @ q @ dagger(r) for r in rots]
            graphs.append(graph_from_generators(orbit, tol))
            orbit_ranks.append(span_rank(orbit, tol))
        gens = repre_generators(n)
        g_gen = graph_from_generators(gens, tol)
        pairwise = np.zeros((n, n))
        for a in range(n):
            for b in range(a + 1, n):
                _, r = graphs_equal(graphs[a], graphs[b], tol)
                pairwise[a, b] = pairwise[b, a] = r
        _, gen_res = graphs_equal(graphs[0], g_gen, tol)
        law = group_law_residual(gens)
    residuals = {
        "coincidence": float(pairwise.max()),
        "generator_span": gen_res,
        "generator_unitarity": law["unitarity"],
        "generator_group_law": law["group_law"],
    }
    eq = tol.eq_tol
    dims = [g.size for g in graphs]
    return Report(
        check="corollary2",
        parameters={"n": n, "reading": reading, "phi_samples": phi_samples},
        residuals=residuals,
        thresholds={k: eq for k in residuals},
        tables={
            "graph_dims": dims,
            "orbit_ranks": orbit_ranks,
            "generator_span_dim": g_gen.size,
            "generator_span_rank": span_rank(gens, tol),
            "pairwise_residual": pairwise,
            "coincide": bool(pairwise.max() < eq),
            "equals_generator_span": bool(gen_res < eq),
        },
        notes=[
            "records whether the phase-orbit graphs coincide and equal span(U_j); "
            "the outcome depends on the reading of Q_j"
        ],
        runtime_ms=timer.ms,
    )
