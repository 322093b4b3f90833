import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opgraph.core import PreconditionError
from opgraph.graphs import KrausSet, graph_from_generators, graph_from_kraus
from opgraph.kl_codes import (
    correct_single_error,
    kl_recovery,
    kl_residual,
    kraus_coefficients,
    random_projection,
    search_anticlique,
    verify_anticlique,
)

from conftest import rand_density, rand_matrix, rand_unitary

X = np.array([[0, 1], [1, 0]], dtype=complex)
TWO_KRAUS = KrausSet([np.eye(4) / np.sqrt(2), np.kron(X, np.eye(2)) / np.sqrt(2)], channel=True)
CODE = np.diag([1, 1, 0, 0]).astype(complex)


def code_state(rng, P):
    w, V = np.linalg.eigh(P)
    J = V[:, w > 0.5]
    r = rand_density(rng, J.shape[1])
    return J @ r @ J.conj().T


def trace_norm(a):
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def diag_graph(n):
    return graph_from_generators([np.diag(np.eye(n)[j]) for j in range(n)])


def test_identity_graph_any_projection(rng):
    g = graph_from_generators([np.eye(3)])
    P = random_projection(3, 2, rng)
    cert = verify_anticlique(g, P)
    assert cert.valid and cert.residual < 1e-14
    assert abs(cert.coeffs[0] - 1 / np.sqrt(3)) < 1e-14


def test_diagonal_graph_rank_one_and_rank_two():
    g = diag_graph(3)
    assert verify_anticlique(g, np.diag([1, 0, 0]).astype(complex)).valid
    P2 = np.diag([1, 1, 0]).astype(complex)
    assert not verify_anticlique(g, P2).valid
    # best multiple of P for diag(1, 2, 3) is 1.5 P, leaving diag(-0.5, 0.5)
    assert abs(kl_residual(np.diag([1.0, 2.0, 3.0]), P2) - 0.5) < 1e-15


def test_verify_rejects_non_projection():
    with pytest.raises(PreconditionError):
        verify_anticlique(diag_graph(2), np.diag([1.0, 0.5]))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), dim=st.integers(2, 5))
def test_rank_one_projections_always_certify(seed, dim):
    r = np.random.default_rng(seed)
    g = graph_from_generators([rand_matrix(r, dim) for _ in range(3)])
    cert = verify_anticlique(g, random_projection(dim, 1, r))
    assert cert.valid and cert.residual < 1e-10


def test_recovery_identity_kraus(rng):
    k = KrausSet([np.eye(3)], channel=True)
    P = random_projection(3, 2, rng)
    R = kl_recovery(k, P)
    rho = code_state(rng, P)
    assert trace_norm(R.apply(k.apply(rho)) - rho) < 1e-12
    assert R.completeness_defect() < 1e-12


def test_recovery_two_kraus_example(rng):
    c = kraus_coefficients(TWO_KRAUS, CODE)
    assert np.abs(c - np.diag([0.5, 0.5])).max() < 1e-15
    R = kl_recovery(TWO_KRAUS, CODE)
    for _ in range(20):
        rho = code_state(rng, CODE)
        direct = sum(r @ v @ rho @ v.conj().T @ r.conj().T for r in R.kraus for v in TWO_KRAUS.ops)
        assert trace_norm(direct - rho) < 1e-10


def _random_correctable(rng, dim_code=2, n_errors=3, dim_out=None):
    """Kraus set whose errors send a code space into orthogonal blocks."""
    dim_out = dim_out or dim_code * n_errors
    W = rand_unitary(rng, dim_out)
    blocks = [W[:, i * dim_code:(i + 1) * dim_code] for i in range(n_errors)]
    U = rand_unitary(rng, n_errors)
    probs = rng.dirichlet(np.ones(n_errors))
    # V_j = sum_l U_jl sqrt(p_l) B_l J^dag, mixed so c_jk is not diagonal
    ops = [sum(U[j, l] * np.sqrt(probs[l]) * blocks[l] for l in range(n_errors)) for j in range(n_errors)]
    dim_in = dim_code + 1
    J = np.eye(dim_in)[:, :dim_code]
    vs = [v @ J.conj().T for v in ops]
    # complete on the orthogonal complement of the code so the set is a channel
    extra = rand_unitary(rng, dim_out)[:, :1] @ np.eye(dim_in)[:, dim_code:].T
    vs = vs + [extra]
    P = J @ J.conj().T
    return KrausSet(vs, channel=True), P


def test_recovery_random_instances(rng):
    for _ in range(20):
        k, P = _random_correctable(rng)
        R = kl_recovery(k, P)
        assert R.completeness_defect() < 1e-9
        for _ in range(20):
            rho = code_state(rng, P)
            assert trace_norm(R.apply(k.apply(rho)) - rho) < 1e-8


def test_recovery_rejects_non_anticlique():
    k = KrausSet([np.eye(2) / np.sqrt(2), X / np.sqrt(2)], channel=True)
    with pytest.raises(PreconditionError):
        kl_recovery(k, np.eye(2))


def test_correct_single_error(rng):
    R = kl_recovery(TWO_KRAUS, CODE)
    rho = code_state(rng, CODE)
    out, d = correct_single_error(R, np.eye(4), rho, CODE)
    assert abs(d - 1) < 1e-12
    assert trace_norm(out - d * rho) < 1e-10
    out, d = correct_single_error(R, np.zeros((4, 4)), rho, CODE)
    assert d == 0 and np.abs(out).max() == 0
    g = graph_from_kraus(TWO_KRAUS)
    for _ in range(10):
        V = sum(complex(*rng.normal(size=2)) * s for s in g.basis)
        out, d = correct_single_error(R, V, rho, CODE)
        assert trace_norm(out - d * rho) < 1e-8
        assert abs(d - np.trace(V.conj().T @ V @ rho).real) < 1e-8


def test_correct_single_error_rejects_outside_span(rng):
    R = kl_recovery(TWO_KRAUS, CODE)
    Z = np.kron(np.diag([1, -1]), np.eye(2))
    with pytest.raises(PreconditionError):
        correct_single_error(R, Z, code_state(rng, CODE), CODE)


def test_search_trivial_cases():
    cert = search_anticlique(graph_from_generators([np.eye(4)]), 2, seed=0, iters=1)
    assert cert is not None and cert.valid
    assert search_anticlique(diag_graph(4), 1, seed=0).valid


def test_search_full_algebra_has_no_rank_two_anticlique():
    full = graph_from_generators([np.outer(np.eye(3)[i], np.eye(3)[j]) for i in range(3) for j in range(3)])
    assert search_anticlique(full, 2, seed=0, iters=3, steps=50) is None


def test_search_finds_bit_flip_code():
    I2 = np.eye(2)
    kron = lambda *a: np.kron(np.kron(a[0], a[1]), a[2])
    ops = [kron(I2, I2, I2) / 2] + [kron(*[X if i == j else I2 for i in range(3)]) / 2 for j in range(3)]
    g = graph_from_kraus(KrausSet(ops, channel=True))
    cert = search_anticlique(g, 2, seed=1)
    assert cert is not None
    # soundness: re-verify independently
    assert verify_anticlique(g, cert.P).residual < 1e-9
    assert kl_recovery(KrausSet(ops, channel=True), cert.P).completeness_defect() < 1e-8
