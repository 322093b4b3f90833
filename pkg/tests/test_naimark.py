import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opgraph.core import PreconditionError
from opgraph.graphs import graph_from_generators, graph_from_povm, graphs_equal
from opgraph.naimark import (
    Povm,
    dilate,
    povm_from_json,
    povm_to_json,
    random_povm,
    subset_element,
    subset_isometry,
    verify_proposition1,
)
from opgraph.formats import FormatError


def projective(n):
    return Povm(n, [np.diag(np.eye(n)[j]).astype(complex) for j in range(n)])


def rank_oracle(p):
    return sum(int(np.linalg.matrix_rank(m)) for m in p.elements)


def test_random_povm_single_outcome():
    p = random_povm(3, 1, seed=5)
    assert np.abs(p.elements[0] - np.eye(3)).max() < 1e-12


def test_random_povm_two_outcomes():
    p = random_povm(2, 2, seed=7)
    assert np.abs(sum(p.elements) - np.eye(2)).max() < 1e-12
    for m in p.elements:
        assert np.linalg.eigvalsh(m)[0] > -1e-12


def test_random_povm_graph_bounded():
    p = random_povm(4, 6, seed=42)
    assert graph_from_povm(p).size <= 6


def test_random_povm_is_deterministic():
    a, b = random_povm(3, 4, seed=9), random_povm(3, 4, seed=9)
    assert all(np.array_equal(x, y) for x, y in zip(a.elements, b.elements))


def test_povm_validation():
    with pytest.raises(PreconditionError):
        Povm(2, [np.eye(2), np.eye(2)])
    with pytest.raises(PreconditionError):
        Povm(2, [np.diag([2.0, 1.0]), np.diag([-1.0, 0.0])])


def test_dilate_projective_minimal():
    p = projective(4)
    d = dilate(p, minimal=True)
    assert d.dimK == rank_oracle(p) == 4


def test_dilate_single_outcome_minimal():
    d = dilate(Povm(3, [np.eye(3)]), minimal=True)
    assert d.dimK == 3
    assert np.abs(d.W.conj().T @ d.W - np.eye(3)).max() < 1e-12
    assert np.abs(d.W @ d.W.conj().T - np.eye(3)).max() < 1e-12


def test_dilate_random_dimensions():
    p = random_povm(3, 4, seed=3)
    assert dilate(p).dimK == 12
    assert dilate(p, minimal=True).dimK == rank_oracle(p)


def test_minimal_dilation_of_rank_deficient_povm():
    v = np.array([1, 1j, 0]) / np.sqrt(2)
    a = np.outer(v, v.conj())
    p = Povm(3, [a, np.eye(3) - a])
    d = dilate(p, minimal=True)
    assert d.dimK == rank_oracle(p) == 3
    assert max(d.invariant_residuals().values()) < 1e-10


@pytest.mark.parametrize("minimal", [False, True])
def test_subset_isometry(minimal):
    p = random_povm(3, 4, seed=1)
    d = dilate(p, minimal=minimal)
    assert np.abs(subset_isometry(d, [])).max() == 0
    assert np.abs(subset_isometry(d, range(4)) - d.W).max() < 1e-12
    v0 = subset_isometry(d, [0])
    assert np.abs(v0.conj().T @ v0 - p.elements[0]).max() < 1e-10
    with pytest.raises(ValueError):
        subset_isometry(d, [4])


def test_disjoint_subsets_give_zero_product():
    p = random_povm(3, 4, seed=2)
    d = dilate(p)
    prod = subset_isometry(d, [0, 1]).conj().T @ subset_isometry(d, [2, 3])
    assert np.abs(prod).max() < 1e-12
    assert np.abs(subset_element(p, [])).max() == 0


def test_proposition1_trivial_povm():
    rep = verify_proposition1(Povm(2, [np.eye(2)]))
    assert rep.passed
    assert rep.parameters["graph_size"] == 1


def test_proposition1_random_seeds():
    for seed in range(100):
        p = random_povm(4, 5, seed)
        rep = verify_proposition1(p, seed=seed)
        assert rep.passed, rep.failures()
        assert rep.residuals["canonical_product"] < 1e-9
        assert rep.residuals["minimal_product"] < 1e-9


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), dim=st.integers(2, 6), m=st.integers(1, 8))
def test_dilation_invariants(seed, dim, m):
    p = random_povm(dim, m, seed)
    canon, mini = dilate(p), dilate(p, minimal=True)
    for d in (canon, mini):
        inv = d.invariant_residuals()
        assert max(inv.values()) < 1e-10, inv
    assert mini.dimK == rank_oracle(p)
    # every pair of subsets from a small family
    subsets = [frozenset(s) for r in range(m + 1) for s in itertools.combinations(range(m), r)][:12]
    spans = []
    for d in (canon, mini):
        prods = []
        for a in subsets:
            for b in subsets:
                x = subset_isometry(d, a).conj().T @ subset_isometry(d, b)
                assert np.abs(x - subset_element(p, a & b)).max() < 1e-9
                prods.append(x)
        spans.append(graph_from_generators([x for x in prods if np.abs(x).max() > 0]))
    assert graphs_equal(*spans)[0]


def test_povm_json_round_trip_and_errors():
    p = random_povm(2, 3, seed=4)
    back = povm_from_json(povm_to_json(p))
    assert all(np.array_equal(a, b) for a, b in zip(p.elements, back.elements))
    bad = povm_to_json(p)
    bad["elements"] = bad["elements"][:2]
    with pytest.raises(FormatError, match="residual"):
        povm_from_json(bad)
