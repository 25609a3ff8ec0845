import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import norm_trees
from specset.calculus import matrix_horner
from specset.dilation import make_T_lambda
from specset.errors import DimensionMismatchError, SpecsetError
from specset.operators import (
    EXACT_METHODS,
    AscentConfig,
    OperatorOnSpace,
    backward_shift,
    brute_force_norm,
    forward_shift,
    identity,
    operator_norm,
    scalar_shift,
    spectral_radius,
    spectrum,
)
from specset.spaces import Leaf, Sum, parse_space, vector_norm


def random_op(rng, space, scale=1.0):
    n = space.total_dimension
    return OperatorOnSpace(scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))), space)


@pytest.mark.parametrize("space", ["l1(3)", "l2(2)", "linf(4)", "sum2(l1(2),l1(2))", "sum1(l2(1),linf(2))"])
def test_identity_has_norm_one(space):
    est = operator_norm(identity(space))
    assert est.lower_bound == pytest.approx(1.0, abs=1e-12)


def test_exact_methods_flagged():
    est = operator_norm(identity("l1(3)"))
    assert est.is_exact and est.method == "exact_l1_columns"
    assert operator_norm(identity("linf(3)")).method == "exact_linf_rows"
    assert operator_norm(identity("l2(3)")).method == "exact_l2_svd"
    mixed = operator_norm(identity("sum2(l1(2),l1(2))"))
    assert mixed.method == "ascent" and not mixed.is_exact


def test_toeplitz_norm_is_bohr_sum(rng):
    a = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    r = 0.3
    T = OperatorOnSpace(matrix_horner(a, scalar_shift(8, r).matrix), Leaf(8, 1))
    assert operator_norm(T).lower_bound == pytest.approx(np.sum(np.abs(a) * r ** np.arange(8)), rel=1e-13)


def test_ascent_matches_brute_force_on_l1_leaf(rng):
    T = random_op(rng, Leaf(3, 1))
    asc = operator_norm(T, AscentConfig(seed=3)).lower_bound
    assert asc == pytest.approx(brute_force_norm(T), abs=1e-6)


def test_brute_force_examples():
    assert brute_force_norm(identity("l1(2)"), resolution=50) == pytest.approx(1.0, abs=1e-9)
    assert brute_force_norm(OperatorOnSpace(np.diag([2.0, 0.0]), Leaf(2, 2))) == pytest.approx(2.0, abs=1e-6)
    assert brute_force_norm(make_T_lambda(0.5)) == pytest.approx(0.5, abs=1e-6)


def test_brute_force_rejects_large_dimension():
    with pytest.raises(SpecsetError, match="ascent"):
        brute_force_norm(identity("l1(5)"))


def test_matrix_shape_checked():
    with pytest.raises(DimensionMismatchError):
        OperatorOnSpace(np.eye(3), Leaf(2, 2))
    with pytest.raises(SpecsetError):
        OperatorOnSpace([[np.inf]], Leaf(1, 2))


def test_matrix_is_read_only():
    T = identity("l2(2)")
    with pytest.raises(ValueError):
        T.matrix[0, 0] = 5


def test_json_round_trip(rng):
    T = random_op(rng, parse_space("sum2(l1(2),l1(2))"))
    back = OperatorOnSpace.from_json(json.loads(json.dumps(T.to_json())))
    assert back.domain == T.domain and np.array_equal(back.matrix, T.matrix)


def test_spectrum_examples():
    ev = spectrum(OperatorOnSpace(np.diag([1, 1j, -2]), Leaf(3, 2)))
    assert sorted(ev, key=lambda z: (z.real, z.imag)) == pytest.approx([-2, 1j, 1])
    assert np.all(spectrum(forward_shift(Leaf(2, 1), 4)) == 0)


def test_companion_spectrum(oracles):
    C = OperatorOnSpace([[0, -2], [1, 3]], Leaf(2, 2))
    assert sorted(spectrum(C).real) == pytest.approx(oracles["companion_roots"], abs=1e-12)


def test_shift_patterns():
    F = forward_shift(Leaf(1, 2), 3, 1)
    B = backward_shift(Leaf(1, 2), 3, 1)
    assert np.array_equal(F.matrix, np.eye(3, k=-1))
    assert np.array_equal(B.matrix, np.eye(3, k=1))
    BF = B.matrix @ F.matrix
    assert np.array_equal(BF[:2, :2], np.eye(2)) and BF[2, 2] == 0


def test_shift_norm_is_scale():
    T = forward_shift(Leaf(1, 2), 3, 0.4, outer_p=1)
    assert operator_norm(T).lower_bound == pytest.approx(0.4, abs=1e-9)
    assert brute_force_norm(T) == pytest.approx(0.4, abs=1e-9)
    S = backward_shift(Leaf(2, 1), 3, 0.7)
    assert operator_norm(S).lower_bound == pytest.approx(0.7, abs=1e-9)


def test_shift_needs_two_blocks():
    with pytest.raises(SpecsetError):
        forward_shift(Leaf(2, 1), 1)


@given(st.sampled_from([1.0, 2.0, math.inf]), st.integers(1, 3), st.integers(0, 10_000))
def test_exact_methods_match_brute_force(p, n, seed):
    T = random_op(np.random.default_rng(seed), Leaf(n, p))
    est = operator_norm(T)
    assert est.method in EXACT_METHODS
    assert abs(est.lower_bound - brute_force_norm(T)) <= 1e-4 * max(1.0, est.lower_bound)


@given(norm_trees(max_leaves=2, max_dim=2), st.integers(0, 10_000))
def test_ascent_never_exceeds_oracle(tree, seed):
    if tree.total_dimension > 3:
        return
    T = random_op(np.random.default_rng(seed), tree)
    est = operator_norm(T)
    bf = brute_force_norm(T)
    assert est.lower_bound <= bf * (1 + 1e-6) + 1e-6 or est.is_exact
    assert est.lower_bound >= bf - 1e-3 * max(1.0, bf)


@given(st.sampled_from([1.0, 2.0, math.inf]), st.integers(1, 4), st.integers(0, 10_000))
def test_submultiplicative(p, n, seed):
    rng = np.random.default_rng(seed)
    S, T = random_op(rng, Leaf(n, p)), random_op(rng, Leaf(n, p))
    assert operator_norm(S @ T).lower_bound <= (
        operator_norm(S).lower_bound * operator_norm(T).lower_bound + 1e-9)


@given(st.sampled_from([1.0, 2.0, math.inf]), st.integers(1, 5), st.integers(0, 10_000))
def test_spectral_radius_below_norm(p, n, seed):
    T = random_op(np.random.default_rng(seed), Leaf(n, p))
    assert spectral_radius(T) <= operator_norm(T).lower_bound + 1e-6


@given(st.integers(2, 6), st.floats(0, 2), st.sampled_from(["l1(2)", "l2(1)", "sum1(l2(1),linf(2))"]))
def test_shifts_nilpotent(blocks, scale, inner):
    for make in (forward_shift, backward_shift):
        T = make(inner, blocks, scale)
        assert np.max(np.abs(spectrum(T))) <= 1e-8
        assert np.allclose(np.linalg.matrix_power(T.matrix, blocks), 0)


def test_ascent_deterministic(rng):
    T = random_op(rng, parse_space("sum2(l1(2),linf(2))"))
    cfg = AscentConfig(seed=11)
    a, b = operator_norm(T, cfg), operator_norm(T, cfg)
    assert a.lower_bound == b.lower_bound and np.array_equal(a.witness, b.witness)


def test_witness_attains_estimate(rng):
    T = random_op(rng, parse_space("sum1(l2(2),l1(2))"))
    est = operator_norm(T)
    x = est.witness
    assert vector_norm(T.codomain, T(x)) / vector_norm(T.domain, x) == pytest.approx(est.lower_bound, rel=1e-12)


def test_brute_force_reaches_zero_inf_summand(rng):
    # an ell_1 sum keeps its extreme points on single summands, ell_inf ones included
    space = Sum((Leaf(1, 1.5), Leaf(1, 2.0), Leaf(1, math.inf)), 1.0)
    for _ in range(3):
        T = random_op(rng, space)
        assert brute_force_norm(T) == pytest.approx(operator_norm(T).lower_bound, abs=1e-9)
