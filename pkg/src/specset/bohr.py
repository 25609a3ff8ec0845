"""Bohr sums, Bohr-radius bisection and the spectral threshold experiment."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .calculus import CompactRegion, RationalFunction, VNConfig, horner, vn_check
from .errors import DomainError, SpecsetError
from .operators import scalar_shift

DEFAULT_TERMS = 200
A_SWEEP = (0.9, 0.99, 0.999, 0.9999)


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Coefficients ``a_0..a_N`` of a function holomorphic on ``|z| < disk_radius``."""

    coefficients: np.ndarray
    disk_radius: float = 1.0
    sup_norm_hint: Optional[float] = None

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=np.complex128))
        if c.ndim != 1 or c.size == 0:
            raise SpecsetError("a series needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise SpecsetError("coefficients must be finite")
        if not self.disk_radius > 0:
            raise SpecsetError("disk radius must be positive")
        if self.sup_norm_hint is not None and self.sup_norm_hint < 0:
            raise SpecsetError("sup norm hint must be nonnegative")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "disk_radius", float(self.disk_radius))

    def sup_norm(self, points: int = 2048) -> float:
        """The hint if present, else the max of ``|f|`` on a grid of the boundary circle."""
        if self.sup_norm_hint is not None:
            return float(self.sup_norm_hint)
        z = self.disk_radius * np.exp(2j * np.pi * np.arange(points) / points)
        return float(np.max(np.abs(horner(self.coefficients, z))))


def bohr_sum(s: TruncatedSeries, r: float) -> float:
    """``sum_n |a_n| r^n``."""
    if r < 0:
        raise DomainError(f"radius must be nonnegative, got {r}")
    if r > s.disk_radius:
        raise DomainError(f"radius {r} exceeds the disk radius {s.disk_radius}")
    return float(horner(np.abs(s.coefficients).astype(np.complex128), r).real)


def extremal_mobius_series(a: float, R: float = 1.0, N: int = DEFAULT_TERMS) -> TruncatedSeries:
    """Taylor coefficients of ``(a - z/R) / (1 - a z/R)`` up to degree ``N``.

    ``a_0 = a`` and ``a_n = -(1 - a^2) a^(n-1) / R^n``. The function is
    unimodular on ``|z| = R``, and its Bohr sum reaches 1 at ``r = R/(1+2a)``.
    """
    if not 0 < a < 1:
        raise SpecsetError(f"a must lie in (0, 1), got {a}")
    if N < 2:
        raise SpecsetError("need N >= 2")
    n = np.arange(1, N + 1)
    coeffs = np.concatenate([[a], -(1 - a * a) * a ** (n - 1) / float(R) ** n])
    return TruncatedSeries(coeffs, R, 1.0)


def _bisect(ok, lo: float, hi: float, tol: float) -> float:
    """Largest point of [lo, hi] where ``ok`` holds, assuming ok(lo)."""
    if ok(hi):
        return hi
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def bohr_radius_estimate(family: Sequence[TruncatedSeries], R: float, tol: float = 1e-8) -> float:
    """Largest ``r`` in ``[0, R]`` with ``bohr_sum(s, r) <= sup|s|`` for every member.

    Bisection keeps the last non-violating radius, so the result sits within
    ``tol`` below the family's threshold.
    """
    family = list(family)
    if not family:
        raise SpecsetError("empty family")
    if tol <= 0:
        raise SpecsetError("tol must be positive")
    sups = [s.sup_norm() for s in family]

    def ok(r):
        return all(bohr_sum(s, r) <= m for s, m in zip(family, sups))

    return _bisect(ok, 0.0, float(R), tol)


def spectral_threshold_estimate(R: float, degree: int = 64, tol: float = 1e-3,
                                a_sweep: Sequence[float] = A_SWEEP,
                                config: Optional[VNConfig] = None) -> float:
    """Largest ``r`` for which the disk of radius ``R`` survives the extremal test.

    At each trial ``r`` the operator ``r M_z`` on ``l1(degree)`` is checked
    against ``f_a(z) = (a - z/R)/(1 - a z/R)`` for each ``a`` in the sweep;
    any certified violation puts ``r`` above the threshold. The answer
    approaches ``R/3`` as ``a -> 1``; the leftover gap ``R/(1+2a) - R/3`` is
    part of the estimate's error.
    """
    if R <= 0:
        raise SpecsetError("R must be positive")
    if degree < 8:
        raise SpecsetError("degree must be at least 8")
    if tol <= 0:
        raise SpecsetError("tol must be positive")
    K = CompactRegion.disk(R)
    funcs = [RationalFunction.scaled_extremal(a, R) for a in a_sweep]
    cfg = config or VNConfig()

    def ok(r):
        T = scalar_shift(degree, r, p=1.0)
        return not any(vn_check(T, f, K, cfg).violated for f in funcs)

    return _bisect(ok, 0.0, float(R), tol)
