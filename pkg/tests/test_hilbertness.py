import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import hilbert_trees
from specset.errors import SpecsetError
from specset.hilbertness import (
    alpha_grid,
    mobius_contraction_probe,
    parallelogram_defect,
    rotation_test,
    symmetry_test,
    symmetry_violation,
)
from specset.operators import OperatorOnSpace, backward_shift
from specset.spaces import Leaf, Sum, parse_space, vector_norm

NON_HILBERT = [Leaf(2, 1), Leaf(2, math.inf), Sum((Leaf(1, 2), Leaf(1, 2)), 1)]


def test_parallelogram_examples():
    assert parallelogram_defect(Leaf(4, 2), 500) <= 1e-10
    assert parallelogram_defect(Leaf(2, 1), 10) >= 2 - 1e-12
    assert parallelogram_defect(Sum((Leaf(1, 2), Leaf(1, 2)), 2), 500) <= 1e-10


@pytest.mark.parametrize("space", NON_HILBERT)
def test_parallelogram_detects(space):
    assert parallelogram_defect(space, 100) > 0.1


def test_rotation_examples():
    good = rotation_test(Leaf(3, 2))
    assert good.passes and good.norm_lb == pytest.approx(1.0, abs=1e-12)
    bad = rotation_test(Leaf(2, 1))
    assert not bad.passes and bad.norm_lb >= math.sqrt(2) - 1e-9
    for p in (1.0, 3.0, math.inf):
        assert rotation_test(Leaf(1, p)).norm_lb == pytest.approx(1.0, abs=1e-9)


def test_symmetry_examples():
    assert symmetry_test(Leaf(3, 2), 1000) <= 1e-10
    assert symmetry_test(Leaf(2, 1), 10_000) > 0.05
    assert symmetry_violation(Leaf(2, 1), [1, 0], [0, 1], 0.3, -2.0) == pytest.approx(0.0, abs=1e-15)
    x, y = np.array([1, 0]), np.array([0.6, 0.8]) / 1.4
    assert symmetry_violation(Leaf(2, 1), x, y, 0.7, 0.7) == 0.0


@given(st.integers(0, 1000), st.floats(1e-3, 1e3), st.floats(-3, 3), st.floats(-3, 3))
def test_symmetry_scale_invariant(seed, t, a, b):
    s = parse_space("sum2(l1(2),linf(1))")
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    x, y = x / vector_norm(s, x), y / vector_norm(s, y)
    base = symmetry_violation(s, x, y, a, b)
    assert symmetry_violation(s, t * x, t * y, a, b) / t == pytest.approx(base, rel=1e-9, abs=1e-12)


def test_probe_alpha_zero_is_norm_comparison():
    T = OperatorOnSpace(np.diag([0.5, 0.2]), Leaf(2, 1))
    res = mobius_contraction_probe(T, alpha=0)
    assert not res.violated and res.lhs <= res.rhs


def test_probe_finds_violation_on_l1_shift():
    T = backward_shift(Leaf(2, 1), 3, 0.9)
    res = mobius_contraction_probe(T, stop_on_violation=True)
    assert res.violated and res.lhs > res.rhs
    # the witness reproduces the reported values
    A = T.matrix - res.alpha * np.eye(6)
    B = np.eye(6) - np.conj(res.alpha) * T.matrix
    assert vector_norm(T.domain, A @ res.witness) == pytest.approx(res.lhs, rel=1e-12)
    assert vector_norm(T.domain, B @ res.witness) == pytest.approx(res.rhs, rel=1e-12)


def test_probe_quiet_on_hilbert_shift():
    T = backward_shift(Leaf(2, 2), 3, 0.95)
    assert not mobius_contraction_probe(T).violated


def test_probe_preconditions():
    T = OperatorOnSpace(np.diag([0.5, 0.2]), Leaf(2, 1))
    with pytest.raises(SpecsetError):
        mobius_contraction_probe(T, alpha=1.0)
    with pytest.raises(SpecsetError):
        mobius_contraction_probe(OperatorOnSpace(np.diag([1.0, 0.2]), Leaf(2, 1)))


def test_alpha_grid_shape():
    g = alpha_grid()
    assert g.size == 64 and np.all(np.abs(g) < 1)


@given(hilbert_trees(), st.integers(0, 1000))
def test_probes_quiet_on_p2_trees(tree, seed):
    assert parallelogram_defect(tree, 50, seed) <= 1e-10
    assert symmetry_test(tree, 50, seed) <= 1e-10
    assert rotation_test(tree).passes


@given(hilbert_trees(max_dim=2), st.integers(0, 1000), st.complex_numbers(max_magnitude=0.9))
def test_probe_quiet_on_p2_contractions(tree, seed, alpha):
    rng = np.random.default_rng(seed)
    n = tree.total_dimension
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    M *= (1 - 1e-6) * rng.uniform(0.1, 1) / np.linalg.norm(M, 2)
    if np.max(np.abs(np.linalg.eigvals(M))) >= 1:
        return
    assert not mobius_contraction_probe(OperatorOnSpace(M, tree), alpha=alpha).violated
