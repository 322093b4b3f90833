"""Dense complex linear algebra on operators.

Operators, vectors and projections are plain ``numpy`` complex arrays. The
Hilbert-Schmidt inner product ``<a, b> = Tr(a^dagger b)`` is the geometry
behind every span computation in the package.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "OpGraphError",
    "DimensionError",
    "PreconditionError",
    "Tolerances",
    "DEFAULT_TOL",
    "OperatorFlags",
    "as_cmatrix",
    "dagger",
    "hs_inner",
    "hs_norm",
    "op_norm",
    "vectorize",
    "span_rank",
    "orthonormalize_span",
    "residual_outside_span",
    "herm_eig",
    "psd_power",
    "classify_operator",
    "projector_onto",
]


class OpGraphError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(OpGraphError, ValueError):
    pass


class PreconditionError(OpGraphError, ValueError):
    pass


@dataclass(frozen=True)
class Tolerances:
    """Rank cutoff (relative to the largest singular value) and equality threshold."""

    rank_tol: float = 1e-9
    eq_tol: float = 1e-9

    def __post_init__(self):
        for name in ("rank_tol", "eq_tol"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ValueError(f"{name} must lie in (0, 1), got {v!r}")

    def with_eq_tol(self, eq_tol):
        return Tolerances(rank_tol=self.rank_tol, eq_tol=eq_tol)


DEFAULT_TOL = Tolerances()


def as_cmatrix(x, name="matrix"):
    """Return ``x`` as a finite 2-D complex128 array."""
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2 or a.size == 0:
        raise DimensionError(f"{name} must be a nonempty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def hs_inner(a, b):
    """Hilbert-Schmidt inner product Tr(a^dagger b), antilinear in ``a``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def hs_norm(a):
    return float(np.linalg.norm(np.asarray(a)))


def op_norm(a):
    """Largest singular value."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def vectorize(ops):
    """Stack operators as the columns of a ``(rows*cols, len(ops))`` matrix."""
    ops = [np.asarray(o, dtype=np.complex128) for o in ops]
    return np.stack([o.reshape(-1) for o in ops], axis=1)


def span_rank(ops, tol=DEFAULT_TOL):
    """Numerical rank of span(ops) from the singular values of the vectorization."""
    s = np.linalg.svd(vectorize(ops), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_tol * s[0]))


def orthonormalize_span(ops, tol=DEFAULT_TOL):
    """HS-orthonormal basis of span(ops).

    Gram-Schmidt in input order, each vector projected out twice. A vector is
    dropped when what survives projection is below ``rank_tol`` times the
    largest singular value of the generator family.
    """
    ops = list(ops)
    if not ops:
        raise ValueError("orthonormalize_span needs at least one operator")
    shape = np.shape(ops[0])
    for o in ops:
        if np.shape(o) != shape:
            raise DimensionError(f"shape mismatch: {shape} vs {np.shape(o)}")
    A = vectorize(ops)
    scale = op_norm(A)
    basis = []
    if scale == 0.0:
        return basis
    cutoff = tol.rank_tol * scale
    full = A.shape[0]
    Q = np.zeros((A.shape[0], 0), dtype=np.complex128)
    for j in range(A.shape[1]):
        if Q.shape[1] == full:
            break
        v = A[:, j].copy()
        for _ in range(2):
            v -= Q @ (Q.conj().T @ v)
        nv = np.linalg.norm(v)
        if nv > cutoff:
            Q = np.concatenate([Q, (v / nv)[:, None]], axis=1)
    return [Q[:, k].reshape(shape) for k in range(Q.shape[1])]


def _check_orthonormal(basis, tol):
    if not basis:
        return
    Q = vectorize(basis)
    dev = hs_norm(Q.conj().T @ Q - np.eye(Q.shape[1]))
    if dev > tol.eq_tol:
        raise PreconditionError(f"basis is not HS-orthonormal (Gram deviation {dev:.3e})")


def residual_outside_span(basis, x, tol=DEFAULT_TOL):
    """HS norm of the component of ``x`` orthogonal to span(basis)."""
    x = np.asarray(x, dtype=np.complex128)
    if not basis:
        return hs_norm(x)
    if np.shape(basis[0]) != x.shape:
        raise DimensionError(f"shape mismatch: {np.shape(basis[0])} vs {x.shape}")
    _check_orthonormal(basis, tol)
    Q = vectorize(basis)
    v = x.reshape(-1)
    r = v - Q @ (Q.conj().T @ v)
    return float(np.linalg.norm(r))


def _hermiticity_defect(h):
    return hs_norm(h - dagger(h)) / max(1.0, hs_norm(h))


def herm_eig(h, tol=DEFAULT_TOL):
    """Eigenvalues (ascending) and unitary eigenvector columns of a Hermitian matrix."""
    h = as_cmatrix(h, "h")
    if h.shape[0] != h.shape[1]:
        raise DimensionError(f"expected a square matrix, got {h.shape}")
    defect = _hermiticity_defect(h)
    if defect > tol.eq_tol:
        raise PreconditionError(f"matrix is not Hermitian (defect {defect:.3e})")
    # symmetrize so eigh sees exactly Hermitian input
    lam, V = np.linalg.eigh(0.5 * (h + dagger(h)))
    return lam, V


def psd_power(m, p, tol=DEFAULT_TOL):
    """``m**p`` for Hermitian PSD ``m``; zero on the numerical kernel for p < 0."""
    lam, V = herm_eig(m, tol)
    top = max(float(np.max(np.abs(lam))), 0.0)
    if top > 0.0 and lam[0] < -tol.eq_tol * max(1.0, top):
        raise PreconditionError(f"matrix is not PSD (min eigenvalue {lam[0]:.3e})")
    keep = lam > tol.rank_tol * top
    powed = np.zeros_like(lam)
    powed[keep] = lam[keep] ** p
    return (V * powed) @ dagger(V)


@dataclass(frozen=True)
class OperatorFlags:
    hermitian: bool
    psd: bool
    projection: bool
    unitary: bool
    isometry: bool


def classify_operator(x, tol=DEFAULT_TOL):
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    rows, cols = x.shape
    square = rows == cols
    isometry = hs_norm(dagger(x) @ x - np.eye(cols)) <= tol.eq_tol
    hermitian = square and hs_norm(x - dagger(x)) <= tol.eq_tol
    psd = hermitian and float(np.linalg.eigvalsh(0.5 * (x + dagger(x)))[0]) >= -tol.eq_tol
    projection = hermitian and hs_norm(x @ x - x) <= tol.eq_tol
    return OperatorFlags(
        hermitian=bool(hermitian),
        psd=bool(psd),
        projection=bool(projection),
        unitary=bool(square and isometry),
        isometry=bool(isometry),
    )


def projector_onto(vectors):
    """Orthogonal projection onto the column span of ``vectors``."""
    v = as_cmatrix(vectors, "vectors")
    q, r = np.linalg.qr(v)
    d = np.abs(np.diag(r))
    q = q[:, d > DEFAULT_TOL.rank_tol * max(d.max(), 1e-300)]
    return q @ dagger(q)
