"""Unitary dynamics of a system coupled to an environment, at finite dimension.

``H`` embeds into ``K = H (x) H_E`` by ``f -> f (x) e``. The Hamiltonian's
spectral projections ``E_j`` play the role of the projection-valued measure,
the commutative algebra ``A`` is ``span{E_j}``, and ``U_t = sum_j
exp(i t lam_j) E_j`` lies in it for every t.

Error operators are ``V_A = A W``. Since ``V_{E_j}^dag V_{E_k} = delta_jk M_j``
with ``M_j = W^dag E_j W``, the algebra graph is ``span{M_j}``; the dynamics
graph ``span{V_t^dag V_s}`` sits inside it and equals it once the time grid
resolves every level.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .core import (
    DEFAULT_TOL,
    PreconditionError,
    as_cmatrix,
    dagger,
    herm_eig,
    hs_norm,
    residual_outside_span,
)
from .graphs import graph_from_generators, graphs_equal
from .report import Report, Timer

__all__ = [
    "BipartiteDynamics",
    "spectral_measure",
    "bipartite_dynamics",
    "random_dynamics",
    "unitary_at",
    "algebra_basis",
    "error_isometry",
    "default_t_grid",
    "distinct_gaps",
    "verify_proposition2",
]


def spectral_measure(h, cluster_tol=None, tol=DEFAULT_TOL):
    """Distinct eigenvalues with their spectral projections.

    Ascending eigenvalues closer than ``cluster_tol`` to their neighbour are
    merged; the default is ``1e-8`` times the spectral radius.
    """
    h = as_cmatrix(h, "hamiltonian")
    lam, V = herm_eig(h, tol)
    radius = float(np.abs(lam).max())
    if cluster_tol is None:
        cluster_tol = 1e-8 * radius if radius > 0 else 1e-8
    groups = [[0]]
    for i in range(1, len(lam)):
        if lam[i] - lam[i - 1] <= cluster_tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    out = []
    for g in groups:
        q = V[:, g]
        out.append((float(np.mean(lam[g])), q @ dagger(q)))
    return out


@dataclass(frozen=True)
class BipartiteDynamics:
    dimH: int
    dimE: int
    hamiltonian: np.ndarray
    env: np.ndarray
    spectral: List[Tuple[float, np.ndarray]]

    @property
    def dimK(self):
        return self.dimH * self.dimE

    @property
    def W(self):
        """Embedding ``f -> f (x) e``."""
        return np.kron(np.eye(self.dimH), self.env.reshape(-1, 1))

    @property
    def levels(self):
        return np.array([lam for lam, _ in self.spectral])

    @property
    def projections(self):
        return [E for _, E in self.spectral]

    def spectral_residuals(self):
        Es = self.projections
        dim = self.dimK
        total = hs_norm(sum(Es) - np.eye(dim))
        orth = max(
            hs_norm(Ei @ Ej - (Ei if i == j else 0.0))
            for i, Ei in enumerate(Es)
            for j, Ej in enumerate(Es)
        )
        recon = hs_norm(sum(lam * E for lam, E in self.spectral) - self.hamiltonian)
        return {"completeness": total, "orthogonality": orth, "reconstruction": recon}


def bipartite_dynamics(h, dimH, dimE, env=None, cluster_tol=None, tol=DEFAULT_TOL):
    h = as_cmatrix(h, "hamiltonian")
    if dimH < 2 or dimE < 1:
        raise ValueError("need dimH >= 2 and dimE >= 1")
    if h.shape != (dimH * dimE, dimH * dimE):
        raise ValueError(f"hamiltonian has shape {h.shape}, expected {(dimH * dimE,) * 2}")
    if env is None:
        env = np.zeros(dimE, dtype=np.complex128)
        env[0] = 1.0
    env = np.asarray(env, dtype=np.complex128).reshape(-1)
    if env.shape != (dimE,) or abs(np.linalg.norm(env) - 1.0) > 1e-12:
        raise ValueError("environment vector must be a unit vector in C^dimE")
    return BipartiteDynamics(
        dimH=dimH,
        dimE=dimE,
        hamiltonian=h,
        env=env,
        spectral=spectral_measure(h, cluster_tol, tol),
    )


def random_dynamics(dimH, dimE, seed):
    """GUE-like Hamiltonian and random environment vector, seeded."""
    rng = np.random.default_rng(seed)
    n = dimH * dimE
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = 0.5 * (a + dagger(a))
    e = rng.normal(size=dimE) + 1j * rng.normal(size=dimE)
    return bipartite_dynamics(h, dimH, dimE, env=e / np.linalg.norm(e))


def unitary_at(d, t):
    return sum(np.exp(1j * t * lam) * E for lam, E in d.spectral)


def algebra_basis(d):
    """Orthonormal basis ``E_j / sqrt(rank E_j)`` of the algebra."""
    return [E / np.sqrt(np.real(np.trace(E))) for E in d.projections]


def error_isometry(d, a=None, t=None, tol=DEFAULT_TOL):
    """``V_A = A W`` for ``A`` in the algebra, or ``V_{U_t}`` when ``t`` is given."""
    if (a is None) == (t is None):
        raise ValueError("give exactly one of a, t")
    if t is not None:
        a = unitary_at(d, t)
    else:
        a = np.asarray(a, dtype=np.complex128)
        res = residual_outside_span(algebra_basis(d), a, tol)
        if res > tol.eq_tol * max(1.0, hs_norm(a)):
            raise PreconditionError(f"operator is outside the spectral algebra (residual {res:.3e})")
    return a @ d.W


def distinct_gaps(levels, tol=1e-9):
    gaps = sorted(abs(a - b) for i, a in enumerate(levels) for b in levels[i + 1:])
    out = []
    for g in gaps:
        if g > tol and (not out or g - out[-1] > tol):
            out.append(g)
    return out


def default_t_grid(d, points=None):
    """Equispaced times on ``[0, 2 pi / gap_min)``.

    The default count is one more than the number of distinct spectral gaps,
    so the grid never triggers the under-sampling warning.
    """
    levels = d.levels
    gaps = distinct_gaps(levels)
    if points is None:
        points = max(2, len(gaps) + 1)
    if not gaps:
        return np.zeros(1) if points == 1 else np.arange(points, dtype=float)
    return 2 * np.pi / gaps[0] * np.arange(points) / points


def verify_proposition2(d, t_grid=None, tol=DEFAULT_TOL, graph_tol=1e-8):
    """Check ``U_t`` lies in the spectral algebra and compare the two graphs.

    ``graph_tol`` is the threshold for graph equality; conditioning of the
    sampled exponential system limits it.
    """
    with Timer() as timer:
        if t_grid is None:
            t_grid = default_t_grid(d)
        t_grid = [float(t) for t in np.atleast_1d(t_grid)]
        if len(set(t_grid)) != len(t_grid):
            raise ValueError("t values must be distinct")
        notes = []
        gaps = distinct_gaps(d.levels)
        if len(t_grid) < len(gaps):
            notes.append(
                f"t grid has {len(t_grid)} points for {len(gaps)} distinct spectral gaps; "
                "the dynamics graph may be under-sampled"
            )
        A = algebra_basis(d)
        member = max(residual_outside_span(A, unitary_at(d, t), tol) for t in t_grid)
        V = [error_isometry(d, t=t) for t in t_grid]
        g_dyn = graph_from_generators([dagger(a) @ b for a in V for b in V], tol)
        W = d.W
        M = [dagger(W) @ E @ W for E in d.projections]
        g_alg = graph_from_generators(M, tol)
        _, gres = graphs_equal(g_dyn, g_alg, tol)
        # g_dyn inside g_alg holds regardless of sampling
        inside = max(residual_outside_span(g_alg.basis, s, tol) for s in g_dyn.basis)
        unit = max(hs_norm(dagger(v) @ v - np.eye(d.dimH)) for v in V)
        spec = d.spectral_residuals()
    residuals = {
        "algebra_membership": member,
        "graph_equality": gres,
        "dyn_inside_alg": inside,
        "embedded_unitarity": unit,
        "spectral_reconstruction": spec["reconstruction"],
    }
    return Report(
        check="prop2",
        parameters={
            "dimH": d.dimH,
            "dimE": d.dimE,
            "levels": len(d.spectral),
            "t_points": len(t_grid),
        },
        residuals=residuals,
        thresholds={
            "algebra_membership": 1e-10,
            "graph_equality": graph_tol,
            "dyn_inside_alg": graph_tol,
            "embedded_unitarity": 1e-10,
        },
        tables={"t_grid": t_grid, "dim_dyn": g_dyn.size, "dim_alg": g_alg.size},
        notes=notes,
        runtime_ms=timer.ms,
    )
