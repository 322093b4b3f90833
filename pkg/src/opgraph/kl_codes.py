"""Knill-Laflamme codes: anticlique certificates, recovery, and search.

A projection ``P`` is an anticlique for a graph ``V`` when ``P S P`` is a
multiple of ``P`` for every ``S`` in ``V``. For an orthonormal graph basis the
only candidate multiple is ``c_k = Tr(P S_k P) / rank P``.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .core import (
    DEFAULT_TOL,
    DimensionError,
    PreconditionError,
    classify_operator,
    dagger,
    hs_norm,
    op_norm,
    orthonormalize_span,
    residual_outside_span,
)
from .formats import matrix_to_json
from .graphs import KrausSet, OperatorGraph, graph_from_kraus

__all__ = [
    "AnticliqueCertificate",
    "RecoveryChannel",
    "kl_residual",
    "verify_anticlique",
    "kraus_coefficients",
    "kl_recovery",
    "correct_single_error",
    "search_anticlique",
    "random_projection",
    "certificate_to_json",
]


@dataclass(frozen=True)
class AnticliqueCertificate:
    P: np.ndarray
    rank: int
    coeffs: np.ndarray
    residual: float
    eq_tol: float = DEFAULT_TOL.eq_tol

    @property
    def valid(self):
        return self.residual < self.eq_tol


@dataclass(frozen=True)
class RecoveryChannel:
    """Kraus operators of the recovery map plus the correctable error span."""

    kraus: List[np.ndarray]
    error_basis: List[np.ndarray]

    def apply(self, rho):
        return sum(r @ rho @ dagger(r) for r in self.kraus)

    def completeness_defect(self):
        dimK = self.kraus[0].shape[1]
        return hs_norm(sum(dagger(r) @ r for r in self.kraus) - np.eye(dimK))


def kl_residual(x, P):
    """Operator-norm distance of ``P x P`` from the best multiple of ``P``."""
    r = int(round(np.real(np.trace(P))))
    c = np.trace(P @ x @ P) / r
    return op_norm(P @ x @ P - c * P)


def _check_projection(P, dim, tol):
    P = np.asarray(P, dtype=np.complex128)
    if P.shape != (dim, dim):
        raise DimensionError(f"projection has shape {P.shape}, expected {(dim, dim)}")
    if not classify_operator(P, tol).projection:
        raise PreconditionError("P is not an orthogonal projection")
    rank = int(round(np.real(np.trace(P))))
    if rank < 1:
        raise PreconditionError("P must have rank at least 1")
    return P, rank


def verify_anticlique(g, P, tol=DEFAULT_TOL):
    P, rank = _check_projection(P, g.dim, tol)
    coeffs = np.array([np.trace(P @ s @ P) / rank for s in g.basis])
    residual = max(op_norm(P @ s @ P - c * P) for s, c in zip(g.basis, coeffs))
    return AnticliqueCertificate(P=P, rank=rank, coeffs=coeffs, residual=float(residual), eq_tol=tol.eq_tol)


def kraus_coefficients(k, P):
    """The matrix ``c_jk = Tr(P V_j^dag V_k P) / rank P``."""
    r = int(round(np.real(np.trace(P))))
    n = len(k.ops)
    c = np.empty((n, n), dtype=np.complex128)
    for j, vj in enumerate(k.ops):
        for l, vl in enumerate(k.ops):
            c[j, l] = np.trace(P @ dagger(vj) @ vl @ P) / r
    return c


def kl_recovery(k, P, tol=DEFAULT_TOL):
    """Recovery channel for errors in span(k) on the code ``P``.

    Rotating the Kraus operators by the eigenvectors of ``c`` makes the
    images ``V~_l P`` mutually orthogonal with ``P V~_l^dag V~_l P = d_l P``.
    Each ``R_l = P V~_l^dag / sqrt(d_l)`` undoes one of them; the remainder of
    the output space is sent to a fixed code vector so the map is trace
    preserving.
    """
    if not isinstance(k, KrausSet):
        k = KrausSet(list(k))
    g = graph_from_kraus(k, tol)
    cert = verify_anticlique(g, P, tol)
    if not cert.valid:
        raise PreconditionError(f"P is not an anticlique for this Kraus set (residual {cert.residual:.3e})")
    P = cert.P
    c = kraus_coefficients(k, P)
    d, U = np.linalg.eigh(0.5 * (c + dagger(c)))
    dimK = k.dim_out
    recovery = []
    covered = np.zeros((dimK, dimK), dtype=np.complex128)
    dmax = max(float(d.max()), 0.0)
    for l in range(len(d)):
        if d[l] <= tol.rank_tol * max(dmax, 1.0):
            continue
        vt = sum(U[j, l] * v for j, v in enumerate(k.ops))
        R = P @ dagger(vt) / np.sqrt(d[l])
        recovery.append(R)
        covered += dagger(R) @ R
    # orthonormal basis of what is left of K
    lam, V = np.linalg.eigh(np.eye(dimK) - 0.5 * (covered + dagger(covered)))
    rest = V[:, lam > 0.5]
    if rest.shape[1]:
        lamP, VP = np.linalg.eigh(P)
        anchor = VP[:, -1:]
        for a in range(rest.shape[1]):
            recovery.append(anchor @ rest[:, a:a + 1].conj().T)
    error_basis = orthonormalize_span(k.ops, tol)
    return RecoveryChannel(kraus=recovery, error_basis=error_basis)


def correct_single_error(recovery, V, rho, P, tol=DEFAULT_TOL):
    """Apply one error ``V`` then the recovery. Returns ``(rho_out, d)``.

    ``d`` is the trace of the output; the correction holds when
    ``rho_out = d * rho``.
    """
    V = np.asarray(V, dtype=np.complex128)
    rho = np.asarray(rho, dtype=np.complex128)
    P = np.asarray(P, dtype=np.complex128)
    res = residual_outside_span(recovery.error_basis, V, tol)
    scale = max(1.0, hs_norm(V))
    if res > tol.eq_tol * scale:
        raise PreconditionError(f"error operator is outside the correctable span (residual {res:.3e})")
    if hs_norm(P @ rho @ P - rho) > 1e-9:
        raise PreconditionError("state is not supported on the code space")
    out = recovery.apply(V @ rho @ dagger(V))
    return out, float(np.real(np.trace(out)))


def random_projection(dim, rank, rng):
    z = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    q, _ = np.linalg.qr(z)
    return q @ dagger(q)


def _objective(basis, P, r):
    total = 0.0
    for s in basis:
        x = P @ s @ P
        c = np.trace(x) / r
        total += hs_norm(x - c * P) ** 2
    return total


def _gradient(basis, P, r):
    G = np.zeros_like(P)
    for s in basis:
        t = np.trace(s @ P)
        G += s @ P @ dagger(s) + dagger(s) @ P @ s - (np.conj(t) * s + t * dagger(s)) / r
    return 0.5 * (G + dagger(G))


def _top_projection(h, r):
    _, V = np.linalg.eigh(h)
    q = V[:, -r:]
    return q @ dagger(q)


def search_anticlique(g, rank, seed=0, iters=20, steps=300, tol=DEFAULT_TOL):
    """Heuristic search for a rank-``rank`` anticlique.

    Each restart starts from a seeded random projection and alternates the
    closed-form coefficient fit with a move of ``P`` to the top eigenspace of
    ``P - eta * grad``. Any returned certificate has been re-verified; ``None``
    proves nothing.
    """
    if not 1 <= rank <= g.dim:
        raise ValueError(f"rank must be in [1, {g.dim}]")
    rng = np.random.default_rng(seed)
    for _ in range(iters):
        P = random_projection(g.dim, rank, rng)
        f = _objective(g.basis, P, rank)
        eta = 0.5
        for _ in range(steps):
            cert = verify_anticlique(g, P, tol)
            if cert.valid:
                return cert
            G = _gradient(g.basis, P, rank)
            while eta > 1e-12:
                P_new = _top_projection(P - eta * G, rank)
                f_new = _objective(g.basis, P_new, rank)
                if f_new < f:
                    break
                eta *= 0.5
            else:
                break
            if f - f_new < 1e-30:
                P, f = P_new, f_new
                break
            P, f = P_new, f_new
            eta = min(eta * 2.0, 10.0)
        cert = verify_anticlique(g, P, tol)
        if cert.valid:
            return cert
    return None


def certificate_to_json(cert):
    return {
        "P": matrix_to_json(cert.P),
        "coeffs": [[float(c.real), float(c.imag)] for c in cert.coeffs],
        "residual": float(cert.residual),
        "rank": int(cert.rank),
        "valid": bool(cert.valid),
    }
