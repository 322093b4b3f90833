import numpy as np
import pytest

from opgraph.oscillator import (
    DEFAULT_GRID,
    GridTooNarrowError,
    QuadratureGrid,
    bracket,
    coherent_psi,
    corollary3_kernel,
    evolved_gram,
    evolved_psi,
    kernel_overlap,
    literal_norm,
    projected_overlap,
    projected_overlap_2d,
    spread_factor,
    two_mode_psi,
    verify_corollary3,
)

XS = DEFAULT_GRID.nodes
W = DEFAULT_GRID.weights


def quad(f):
    return np.sum(W * f)


def quad2(f):
    return W @ f @ W


def test_coherent_at_origin():
    assert abs(coherent_psi(0, 0.0) - np.pi**-0.25) < 1e-15
    assert abs(np.pi**-0.25 - 0.751126) < 1e-6


@pytest.mark.parametrize("alpha", [0, 1, 0.5 + 0.5j])
def test_coherent_normalized(alpha):
    assert abs(quad(np.abs(coherent_psi(alpha, XS)) ** 2) - 1) < 1e-10


def test_coherent_overlap():
    val = quad(np.conj(coherent_psi(0, XS)) * coherent_psi(1, XS))
    assert abs(val - np.exp(-0.5)) < 1e-9
    a, b = 0.3 - 0.4j, -0.2 + 1.1j
    val = quad(np.conj(coherent_psi(a, XS)) * coherent_psi(b, XS))
    assert abs(abs(val) - np.exp(-abs(a - b) ** 2 / 2)) < 1e-9


def test_coherent_is_annihilation_eigenvector():
    # a = (x + d/dx)/sqrt(2); check on a fine central-difference grid
    alpha = 0.7 - 0.3j
    x = np.linspace(-6, 6, 20001)
    f = coherent_psi(alpha, x)
    df = np.gradient(f, x)
    lhs = (x * f + df) / np.sqrt(2)
    assert np.abs(lhs - alpha * f)[100:-100].max() < 1e-6


def test_two_mode_literal_value_and_norm():
    assert abs(two_mode_psi(0, 0, 0.0, 0.0) - 1 / np.sqrt(2) / np.sqrt(np.pi)) < 1e-15
    X, Y = XS[:, None], XS[None, :]
    norm2d = np.sqrt(quad2(np.abs(two_mode_psi(0.3, 1j, X, Y)) ** 2).real)
    assert abs(norm2d - 2**-0.75) < 1e-9
    assert abs(literal_norm(0.3, 1j) - 2**-0.75) < 1e-10
    normed = np.sqrt(quad2(np.abs(two_mode_psi(0.3, 1j, X, Y, normalized=True)) ** 2).real)
    assert abs(normed - 1) < 1e-9


def test_evolved_reduces_at_t0():
    x = np.linspace(-4, 4, 41)
    for a, b in [(0, 0), (1, 0.5), (0.8j, -0.3 + 0.2j)]:
        assert np.array_equal(evolved_psi(a, b, 0.0, x, 0.3), two_mode_psi(a, b, x, 0.3))


def test_spread_factor_branch_is_continuous():
    ts = np.linspace(-3, 3, 6001)
    s = spread_factor(ts)
    assert np.all(s.real > 0)
    assert np.abs(np.diff(s)).max() < 2e-3


def test_environment_phase_composes():
    beta = 0.5 + 0.2j
    rot = lambda t, b: np.exp(-1j * np.sqrt(2) * t) * b
    assert abs(rot(0.3, rot(0.9, beta)) - rot(1.2, beta)) < 1e-15


def test_gram_preserved_for_vacuum_free_mode():
    wide = DEFAULT_GRID.widened()
    g0 = evolved_gram(0.0, [0.0], 0.5, wide)
    for t in (0.3, 1.0):
        assert np.abs(evolved_gram(t, [0.0], 0.5, wide) - g0).max() < 1e-6


def test_gram_drift_is_measured_for_displaced_states():
    wide = DEFAULT_GRID.widened()
    g0 = evolved_gram(0.0, [0, 1, 1j], 0.5, wide)
    g1 = evolved_gram(1.0, [0, 1, 1j], 0.5, wide)
    # the propagator formula does not conserve the norm of a displaced packet
    assert abs(g1[1, 1] - g0[1, 1]) > 0.1


def test_kernel_at_t0_vacuum():
    xt, yt = np.meshgrid(np.linspace(-2, 2, 9), np.linspace(-2, 2, 9), indexing="ij")
    k = corollary3_kernel(0.0, 0.4, 0.0, xt, yt)
    assert np.abs(k - bracket(0.4, xt) * bracket(0.0, yt)).max() < 1e-15


def test_projected_overlap_trivial():
    assert abs(projected_overlap(0.0, 0.7, 0.7, 0.5) - 1) < 1e-9
    assert abs(projected_overlap(0.0, 0, 1, 0.5) - np.exp(-0.5)) < 1e-8


@pytest.mark.parametrize("args", [(0.4, 1, 0.8j, 0.5), (1.1, 0.8j, 0, 1.0)])
def test_projected_overlap_factorized_vs_2d(args):
    assert abs(projected_overlap(*args) - projected_overlap_2d(*args)) < 1e-8


def test_grid_refinement_stability():
    fine = DEFAULT_GRID.refined()
    assert fine.points == 4001
    for args in [(0.4, 1, 0.8j, 0.5), (1.1, 0, 1, 1.0), (0.0, 0.8j, 1, 0.5)]:
        assert abs(projected_overlap(*args) - projected_overlap(*args, grid=fine)) < 1e-9


def test_grid_too_narrow():
    narrow = QuadratureGrid(-3, 3, 201)
    with pytest.raises(GridTooNarrowError):
        projected_overlap(0.0, 0, 1, 0.5, grid=narrow)
    with pytest.raises(ValueError):
        QuadratureGrid(-3, 3, 200)


def test_ratio_is_constant_and_matches_missing_factor():
    for beta in (0.5, 1.0):
        ratios = []
        for t in (0.0, 0.4, 1.1):
            for a in (0, 1, 0.8j):
                for ap in (0, 1, 0.8j):
                    ratios.append(projected_overlap(t, a, ap, beta) / kernel_overlap(t, a, ap, beta))
        ratios = np.array(ratios)
        const = ratios.mean()
        assert np.abs(ratios - const).max() / abs(const) < 1e-5
        assert abs(const - np.exp(-beta**2)) < 1e-5


def test_verify_corollary3_report():
    rep = verify_corollary3()
    assert rep.residuals["ratio_spread"] < 1e-5
    assert rep.residuals["ratio_t_rows"] < 1e-5
    assert rep.residuals["constant_vs_exp_minus_beta2"] < 1e-5
    assert rep.tables["frame_rank"] >= 1
    assert rep.residuals["unitarity_gram_drift"] > 1e-6
    assert rep.failures() == ["unitarity_gram_drift"]


def test_verify_corollary3_vacuum_environment():
    rep = verify_corollary3(beta=0.0)
    assert abs(rep.tables["measured_constant"] - 1) < 1e-6
