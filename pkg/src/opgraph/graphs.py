"""Noncommutative operator graphs at finite dimension.

A graph is an operator subspace of B(H) stored by an HS-orthonormal basis.
Only the span matters downstream, so the generators are not kept; the
``provenance`` tag says where the span came from.

For a finite-outcome POVM the span of ``M(B)`` over all outcome subsets ``B``
equals the span of the single-outcome elements, since each ``M(B)`` is a sum
of them. Unions are therefore never materialized.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .core import (
    DEFAULT_TOL,
    DimensionError,
    PreconditionError,
    as_cmatrix,
    dagger,
    hs_norm,
    orthonormalize_span,
    residual_outside_span,
    vectorize,
)
from .formats import FormatError, matrix_from_json, matrix_to_json

__all__ = [
    "OperatorGraph",
    "KrausSet",
    "SystemFlags",
    "graph_from_generators",
    "graph_from_kraus",
    "graph_from_povm",
    "graphs_equal",
    "operator_system_check",
    "graph_to_json",
    "graph_from_json",
    "kraus_to_json",
    "kraus_from_json",
]

PROVENANCES = ("kraus", "povm", "generators")


@dataclass(frozen=True)
class OperatorGraph:
    dim: int
    basis: List[np.ndarray]
    provenance: str = "generators"

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if not 1 <= len(self.basis) <= self.dim**2:
            raise DimensionError(f"graph basis size {len(self.basis)} outside [1, {self.dim**2}]")
        for b in self.basis:
            if b.shape != (self.dim, self.dim):
                raise DimensionError(f"basis element has shape {b.shape}, expected {(self.dim,) * 2}")
        Q = vectorize(self.basis)
        dev = hs_norm(Q.conj().T @ Q - np.eye(len(self.basis)))
        if dev > 1e-10:
            raise PreconditionError(f"graph basis is not orthonormal (Gram deviation {dev:.3e})")

    @property
    def size(self):
        return len(self.basis)

    def residual(self, x, tol=DEFAULT_TOL):
        return residual_outside_span(self.basis, x, tol)

    def contains(self, x, tol=DEFAULT_TOL):
        return self.residual(x, tol) < tol.eq_tol

    def coefficients(self, x):
        """Expansion coefficients ``<S_k, x>`` of ``x`` in the basis."""
        Q = vectorize(self.basis)
        return Q.conj().T @ np.asarray(x, dtype=np.complex128).reshape(-1)


@dataclass(frozen=True)
class KrausSet:
    """Error operators ``V_k : H -> K``; ``channel`` asserts sum V_k^dag V_k = I."""

    ops: List[np.ndarray]
    channel: bool = False

    def __post_init__(self):
        if not self.ops:
            raise ValueError("KrausSet needs at least one operator")
        ops = [as_cmatrix(v, "Kraus operator") for v in self.ops]
        shape = ops[0].shape
        for v in ops:
            if v.shape != shape:
                raise ValueError(f"Kraus shape mismatch: {shape} vs {v.shape}")
        object.__setattr__(self, "ops", ops)
        if self.channel:
            dev = self.trace_defect()
            if dev > 1e-9:
                raise PreconditionError(f"Kraus set is not trace preserving (defect {dev:.3e})")

    @property
    def dim_in(self):
        return self.ops[0].shape[1]

    @property
    def dim_out(self):
        return self.ops[0].shape[0]

    def trace_defect(self):
        s = sum(dagger(v) @ v for v in self.ops)
        return hs_norm(s - np.eye(self.dim_in))

    def products(self):
        """All ``V_j^dag V_k`` in row-major (j, k) order."""
        return [dagger(vj) @ vk for vj in self.ops for vk in self.ops]

    def apply(self, rho):
        return sum(v @ rho @ dagger(v) for v in self.ops)


def graph_from_generators(ops, tol=DEFAULT_TOL, provenance="generators"):
    ops = [as_cmatrix(o) for o in ops]
    if not ops:
        raise ValueError("need at least one generator")
    if ops[0].shape[0] != ops[0].shape[1]:
        raise DimensionError(f"graph generators must be square, got {ops[0].shape}")
    basis = orthonormalize_span(ops, tol)
    if not basis:
        raise PreconditionError("generators span the zero subspace")
    return OperatorGraph(dim=ops[0].shape[0], basis=basis, provenance=provenance)


def graph_from_kraus(k, tol=DEFAULT_TOL):
    if not isinstance(k, KrausSet):
        k = KrausSet(list(k))
    return graph_from_generators(k.products(), tol, provenance="kraus")


def graph_from_povm(p, tol=DEFAULT_TOL):
    return graph_from_generators(p.elements, tol, provenance="povm")


def graphs_equal(g1, g2, tol=DEFAULT_TOL):
    """Mutual containment of spans. Returns ``(equal, max_residual)``."""
    if g1.dim != g2.dim:
        raise DimensionError(f"graph dimensions differ: {g1.dim} vs {g2.dim}")
    worst = 0.0
    for s in g1.basis:
        worst = max(worst, residual_outside_span(g2.basis, s, tol))
    for s in g2.basis:
        worst = max(worst, residual_outside_span(g1.basis, s, tol))
    return worst < tol.eq_tol, worst


@dataclass(frozen=True)
class SystemFlags:
    has_identity: bool
    adjoint_closed: bool
    identity_residual: float = 0.0
    adjoint_residual: float = 0.0

    @property
    def operator_system(self):
        return self.has_identity and self.adjoint_closed


def operator_system_check(g, tol=DEFAULT_TOL):
    id_res = residual_outside_span(g.basis, np.eye(g.dim), tol)
    adj_res = max(residual_outside_span(g.basis, dagger(s), tol) for s in g.basis)
    return SystemFlags(
        has_identity=id_res < tol.eq_tol,
        adjoint_closed=adj_res < tol.eq_tol,
        identity_residual=id_res,
        adjoint_residual=adj_res,
    )


def graph_to_json(g):
    return {"dim": g.dim, "basis": [matrix_to_json(b) for b in g.basis]}


def graph_from_json(obj, tol=DEFAULT_TOL):
    """Parse a graph file; the listed matrices are re-orthonormalized."""
    if not isinstance(obj, dict) or "basis" not in obj or "dim" not in obj:
        raise FormatError("graph: expected an object with fields 'dim' and 'basis'")
    dim = obj["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise FormatError(f"graph: field 'dim' must be a positive integer, got {dim!r}")
    if not isinstance(obj["basis"], list) or not obj["basis"]:
        raise FormatError("graph: field 'basis' must be a nonempty list")
    mats = [matrix_from_json(m, f"graph.basis[{i}]") for i, m in enumerate(obj["basis"])]
    for i, m in enumerate(mats):
        if m.shape != (dim, dim):
            raise FormatError(f"graph: field 'basis[{i}]' has shape {m.shape}, expected {(dim, dim)}")
    return graph_from_generators(mats, tol)


def kraus_to_json(k):
    return {"ops": [matrix_to_json(v) for v in k.ops], "channel": bool(k.channel)}


def kraus_from_json(obj):
    if not isinstance(obj, dict) or not isinstance(obj.get("ops"), list) or not obj["ops"]:
        raise FormatError("kraus: field 'ops' must be a nonempty list")
    ops = [matrix_from_json(m, f"kraus.ops[{i}]") for i, m in enumerate(obj["ops"])]
    shape = ops[0].shape
    for i, v in enumerate(ops):
        if v.shape != shape:
            raise FormatError(f"kraus: field 'ops[{i}]' has shape {v.shape}, expected {shape}")
    channel = bool(obj.get("channel", False))
    try:
        return KrausSet(ops, channel=channel)
    except PreconditionError as exc:
        raise FormatError(f"kraus: {exc}") from exc
