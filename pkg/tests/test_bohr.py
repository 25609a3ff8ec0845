import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from specset.bohr import (
    TruncatedSeries,
    bohr_radius_estimate,
    bohr_sum,
    extremal_mobius_series,
    spectral_threshold_estimate,
)
from specset.errors import DomainError, SpecsetError


def test_bohr_sum_at_zero_is_constant_term():
    s = TruncatedSeries([-3 + 4j, 1, 2])
    assert bohr_sum(s, 0.0) == 5.0


def test_bohr_sum_rejects_radius_beyond_disk():
    with pytest.raises(DomainError):
        bohr_sum(TruncatedSeries([1, 1], disk_radius=2), 2.5)
    with pytest.raises(DomainError):
        bohr_sum(TruncatedSeries([1, 1]), -0.1)


def test_extremal_closed_form_at_half():
    s = extremal_mobius_series(0.5, 1.0, 200)
    assert bohr_sum(s, 0.5) == pytest.approx(0.5 + 0.75 * 0.5 / 0.75, abs=1e-6)


def test_extremal_coefficients(oracles):
    s = extremal_mobius_series(0.5, 1.0, 10)
    assert s.coefficients[:4].real == pytest.approx(oracles["mobius_series_a05"], abs=1e-15)
    assert s.sup_norm_hint == 1.0


def test_extremal_is_unimodular_on_circle():
    s = extremal_mobius_series(0.7, 1.0, 400)
    grid = TruncatedSeries(s.coefficients)  # no hint, so the grid is used
    assert grid.sup_norm(4096) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("a", [0.3, 0.5, 0.9])
def test_bohr_sum_reaches_one_at_closed_form(a):
    s = extremal_mobius_series(a, 1.0, 200)
    assert bohr_sum(s, 1 / (1 + 2 * a)) == pytest.approx(1.0, abs=1e-8)


def test_extremal_rejects_bad_a():
    for a in (0.0, 1.0, -0.2):
        with pytest.raises(SpecsetError):
            extremal_mobius_series(a)


def test_radius_estimates(oracles):
    est = bohr_radius_estimate([extremal_mobius_series(0.9)], 1.0, tol=1e-8)
    assert est == pytest.approx(oracles["bohr_radius"]["0.9"], abs=1e-8)
    est = bohr_radius_estimate([extremal_mobius_series(0.999)], 1.0, tol=1e-8)
    assert est == pytest.approx(oracles["bohr_radius"]["0.999"], abs=1e-8)
    family = [extremal_mobius_series(a) for a in (0.9, 0.99, 0.999)]
    assert bohr_radius_estimate(family, 1.0, 1e-8) == pytest.approx(oracles["bohr_radius"]["0.999"], abs=1e-8)


def test_constant_family_keeps_full_radius():
    assert bohr_radius_estimate([TruncatedSeries([1.0], 2.0)], 2.0) == 2.0


def test_empty_family_rejected():
    with pytest.raises(SpecsetError):
        bohr_radius_estimate([], 1.0)


def test_threshold_at_unit_disk():
    assert spectral_threshold_estimate(1.0, degree=64, tol=1e-3) == pytest.approx(1 / 3, abs=2e-3)


@pytest.mark.parametrize("R,band", [(3.0, 5e-3), (6.0, 1e-2)])
def test_threshold_scales(R, band):
    assert spectral_threshold_estimate(R, degree=64, tol=1e-3) == pytest.approx(R / 3, abs=band)


@given(st.lists(st.complex_numbers(max_magnitude=5), min_size=1, max_size=10),
       st.floats(0, 1), st.floats(0, 1))
def test_bohr_sum_monotone_and_convex(coeffs, r1, r2):
    s = TruncatedSeries(coeffs)
    lo, hi = sorted((r1, r2))
    assert bohr_sum(s, lo) <= bohr_sum(s, hi) + 1e-12
    mid = 0.5 * (lo + hi)
    assert bohr_sum(s, mid) <= 0.5 * (bohr_sum(s, lo) + bohr_sum(s, hi)) + 1e-9


@given(st.integers(0, 10_000), st.integers(1, 12))
def test_bohr_inequality_at_one_third(seed, deg):
    rng = np.random.default_rng(seed)
    s = TruncatedSeries(rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1))
    assert bohr_sum(s, 1 / 3) <= s.sup_norm(1024) * (1 + 1e-6)


@given(st.integers(0, 10_000), st.floats(0.2, 5.0))
def test_scale_equivariance(seed, k):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    s = TruncatedSeries(c, 1.0)
    t = TruncatedSeries(c / k ** np.arange(8), k)
    for r in (0.1, 0.3, 0.7):
        assert bohr_sum(t, k * r) == pytest.approx(bohr_sum(s, r), rel=1e-9)
    a = 0.9
    e1 = bohr_radius_estimate([extremal_mobius_series(a, 1.0)], 1.0, 1e-10)
    ek = bohr_radius_estimate([extremal_mobius_series(a, k)], k, 1e-10 * k)
    assert ek / k == pytest.approx(e1, abs=1e-9)


@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_radius_decreases_in_a(a, b):
    if abs(a - b) < 1e-3:
        return
    lo, hi = sorted((a, b))
    r_lo = bohr_radius_estimate([extremal_mobius_series(lo)], 1.0, 1e-9)
    r_hi = bohr_radius_estimate([extremal_mobius_series(hi)], 1.0, 1e-9)
    assert r_hi < r_lo
