"""Rational functional calculus and von Neumann checks.

Rational functions are coefficient pairs (ascending powers). They can be
evaluated at points, applied to operators as ``p(T) q(T)^{-1}``, assembled
into matrices, and compared with their sup norm on a compact region: a closed
disk with finitely many open disks removed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import PoleError, SpecsetError, SpectralInclusionError
from .operators import AscentConfig, OperatorOnSpace, operator_norm, spectrum
from .spaces import Sum

POLE_TOL = 1e-14
REGION_POLE_TOL = 1e-8
INCLUSION_TOL = 1e-8
DEFAULT_BOUNDARY_POINTS = 2048
POLE_GRID_POINTS = 2048


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.nonzero(c)[0]
    return c[: nz[-1] + 1] if nz.size else c[:1]


def horner(coeffs: np.ndarray, z):
    z = np.asarray(z, dtype=np.complex128)
    acc = np.zeros_like(z) + coeffs[-1]
    for c in coeffs[-2::-1]:
        acc = acc * z + c
    return acc


def matrix_horner(coeffs: np.ndarray, M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    acc = coeffs[-1] * eye
    for c in coeffs[-2::-1]:
        acc = acc @ M + c * eye
    return acc


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """``numerator(z) / denominator(z)``; no common factors are cancelled."""

    numerator: np.ndarray
    denominator: np.ndarray = field(default_factory=lambda: np.ones(1, dtype=np.complex128))

    def __post_init__(self):
        num = np.atleast_1d(np.asarray(self.numerator, dtype=np.complex128))
        den = np.atleast_1d(np.asarray(self.denominator, dtype=np.complex128))
        if num.ndim != 1 or den.ndim != 1 or num.size == 0 or den.size == 0:
            raise SpecsetError("numerator and denominator need at least one coefficient")
        if not (np.all(np.isfinite(num)) and np.all(np.isfinite(den))):
            raise SpecsetError("coefficients must be finite")
        if not np.any(den):
            raise SpecsetError("denominator is identically zero")
        num, den = _trim(num), _trim(den)
        num.setflags(write=False)
        den.setflags(write=False)
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @classmethod
    def polynomial(cls, coeffs) -> "RationalFunction":
        return cls(coeffs, [1.0])

    @classmethod
    def constant(cls, c: complex) -> "RationalFunction":
        return cls([c], [1.0])

    @classmethod
    def mobius(cls, a: complex) -> "RationalFunction":
        """The disk automorphism ``(z - a) / (1 - conj(a) z)``."""
        return cls([-a, 1.0], [1.0, -np.conj(a)])

    @classmethod
    def scaled_extremal(cls, a: float, R: float = 1.0) -> "RationalFunction":
        """``(a - z/R) / (1 - a z/R)``, unimodular on ``|z| = R``."""
        return cls([a, -1.0 / R], [1.0, -a / R])

    @classmethod
    def inverse_power(cls, alpha: complex, m: int) -> "RationalFunction":
        """``(z - alpha)^(-m)``."""
        den = np.ones(1, dtype=np.complex128)
        for _ in range(m):
            den = np.convolve(den, [-alpha, 1.0])
        return cls([1.0], den)

    @property
    def is_polynomial(self) -> bool:
        return self.denominator.size == 1

    def __call__(self, z):
        """Vectorized evaluation without the pole guard."""
        return horner(self.numerator, z) / horner(self.denominator, z)

    def __add__(self, other):
        return rat_add(self, _lift(other))

    __radd__ = __add__

    def __mul__(self, other):
        return rat_mul(self, _lift(other))

    __rmul__ = __mul__

    def to_json(self) -> dict:
        enc = lambda c: [[float(z.real), float(z.imag)] for z in c]
        return {"numerator": enc(self.numerator), "denominator": enc(self.denominator)}

    @classmethod
    def from_json(cls, data: dict) -> "RationalFunction":
        dec = lambda c: [complex(re, im) for re, im in c]
        return cls(dec(data["numerator"]), dec(data["denominator"]))


def _lift(x) -> RationalFunction:
    return x if isinstance(x, RationalFunction) else RationalFunction.constant(x)


def rat_eval(f: RationalFunction, z: complex) -> complex:
    q = complex(horner(f.denominator, z))
    if abs(q) <= POLE_TOL:
        raise PoleError(f"denominator vanishes at z={complex(z)}", z=z)
    return complex(horner(f.numerator, z)) / q


def _padd(a, b):
    out = np.zeros(max(a.size, b.size), dtype=np.complex128)
    out[: a.size] += a
    out[: b.size] += b
    return out


def rat_add(f: RationalFunction, g: RationalFunction) -> RationalFunction:
    if np.array_equal(f.denominator, g.denominator):
        return RationalFunction(_padd(f.numerator, g.numerator), f.denominator)
    num = _padd(np.convolve(f.numerator, g.denominator), np.convolve(g.numerator, f.denominator))
    return RationalFunction(num, np.convolve(f.denominator, g.denominator))


def rat_mul(f: RationalFunction, g: RationalFunction) -> RationalFunction:
    return RationalFunction(np.convolve(f.numerator, g.numerator),
                            np.convolve(f.denominator, g.denominator))


def rat_compose_mobius(f: RationalFunction, a: complex) -> RationalFunction:
    """``f((z - a) / (1 - conj(a) z))`` cleared to a single fraction."""
    if abs(a) >= 1:
        raise SpecsetError(f"Mobius parameter must lie in the open unit disk, got {a}")
    D = max(f.numerator.size, f.denominator.size) - 1
    top = np.array([-a, 1.0], dtype=np.complex128)
    bottom = np.array([1.0, -np.conj(a)], dtype=np.complex128)

    def substitute(coeffs):
        out = np.zeros(D + 1, dtype=np.complex128)
        for k, c in enumerate(coeffs):
            term = np.ones(1, dtype=np.complex128)
            for _ in range(k):
                term = np.convolve(term, top)
            for _ in range(D - k):
                term = np.convolve(term, bottom)
            out[: term.size] += c * term
        return out

    return RationalFunction(substitute(f.numerator), substitute(f.denominator))


# ---------------------------------------------------------------- regions

@dataclass(frozen=True)
class CompactRegion:
    """Closed disk ``|z - center| <= radius`` minus open disks ``holes``."""

    center: complex
    radius: float
    holes: tuple = ()

    def __post_init__(self):
        if not self.radius > 0:
            raise SpecsetError(f"outer radius must be positive, got {self.radius}")
        holes = tuple((complex(c), float(r)) for c, r in self.holes)
        for c, r in holes:
            if r <= 0:
                raise SpecsetError(f"hole radius must be positive, got {r}")
            if abs(c - self.center) + r >= self.radius:
                raise SpecsetError(f"hole D({c}, {r}) is not inside the open outer disk")
        for i, (c1, r1) in enumerate(holes):
            for c2, r2 in holes[i + 1:]:
                if abs(c1 - c2) <= r1 + r2:
                    raise SpecsetError("hole closures must be pairwise disjoint")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "holes", holes)

    @classmethod
    def disk(cls, radius: float = 1.0, center: complex = 0.0) -> "CompactRegion":
        return cls(center, radius)

    def distance(self, z) -> np.ndarray:
        """Euclidean distance to the region (zero inside)."""
        z = np.asarray(z, dtype=np.complex128)
        d = np.maximum(np.abs(z - self.center) - self.radius, 0.0)
        for c, r in self.holes:
            d = np.maximum(d, r - np.abs(z - c))
        return d

    def contains(self, z, tol: float = 0.0):
        return self.distance(z) <= tol

    def circles(self):
        yield self.center, self.radius
        yield from self.holes

    def boundary_points(self, n: int) -> np.ndarray:
        """``n`` equispaced points on every boundary circle, angle 0 first."""
        theta = 2 * np.pi * np.arange(n) / n
        w = np.exp(1j * theta)
        return np.concatenate([c + r * w for c, r in self.circles()])

    def interior_points(self, n: int) -> np.ndarray:
        """Deterministic polar grid of about ``n`` points, filtered to the region."""
        if n <= 0:
            return np.zeros(0, dtype=np.complex128)
        rings = max(1, int(round(math.sqrt(n / 4))))
        per = max(4, n // rings)
        radii = self.radius * (np.arange(1, rings + 1) - 0.5) / rings
        theta = 2 * np.pi * (np.arange(per) + 0.5) / per
        pts = (self.center + radii[:, None] * np.exp(1j * theta)[None, :]).ravel()
        pts = np.concatenate([[self.center], pts])
        return pts[self.contains(pts)]

    def to_json(self) -> dict:
        c = lambda z: [z.real, z.imag]
        return {"outer": {"c": c(self.center), "r": self.radius},
                "holes": [{"c": c(h), "r": r} for h, r in self.holes]}

    @classmethod
    def from_json(cls, data: dict) -> "CompactRegion":
        o = data["outer"]
        return cls(complex(*o["c"]), o["r"], tuple((complex(*h["c"]), h["r"]) for h in data.get("holes", [])))


def check_no_poles(f: RationalFunction, K: CompactRegion) -> None:
    """Reject ``f`` if its denominator has a zero on (or within 1e-8 of) ``K``."""
    if f.is_polynomial:
        return
    roots = np.roots(f.denominator[::-1])
    if roots.size:
        bad = roots[K.distance(roots) <= REGION_POLE_TOL]
        if bad.size:
            raise PoleError(f"denominator has a zero in the region at {complex(bad[0]):.6g}", z=complex(bad[0]))
    n = POLE_GRID_POINTS // 2
    grid = np.concatenate([K.boundary_points(n // (1 + len(K.holes))), K.interior_points(n)])
    q = np.abs(horner(f.denominator, grid))
    i = int(np.argmin(q))
    if q[i] <= REGION_POLE_TOL:
        raise PoleError(f"denominator nearly vanishes on the region (|q|={q[i]:.3g})", z=complex(grid[i]))


def check_spectral_inclusion(T: OperatorOnSpace, K: CompactRegion, tol: float = INCLUSION_TOL) -> np.ndarray:
    """Return the spectrum of ``T`` after checking it lies in ``K``.

    Any induced matrix norm bounds the spectral radius, so when the disk of
    that radius fits inside ``K`` no eigenvalue computation can overturn
    the answer.
    """
    ev = spectrum(T)
    M = T.matrix
    bound = min(np.abs(M).sum(axis=0).max(), np.abs(M).sum(axis=1).max(), np.linalg.norm(M, 2))
    if abs(K.center) + bound <= K.radius and all(abs(c) - r >= bound for c, r in K.holes):
        return ev
    bad = ev[K.distance(ev) > tol]
    if bad.size:
        raise SpectralInclusionError(bad)
    return ev


def rat_apply_operator(f: RationalFunction, T: OperatorOnSpace, K: CompactRegion) -> OperatorOnSpace:
    """``f(T) = p(T) q(T)^{-1}`` for ``spectrum(T)`` inside ``K``."""
    check_spectral_inclusion(T, K)
    check_no_poles(f, K)
    M = T.matrix
    P = matrix_horner(f.numerator, M)
    if f.is_polynomial:
        return T.with_matrix(P / f.denominator[0])
    Q = matrix_horner(f.denominator, M)
    try:
        X = np.linalg.solve(Q, P)
    except np.linalg.LinAlgError as exc:
        raise PoleError("q(T) is singular") from exc
    resid = np.linalg.norm(Q @ X - P)
    scale = np.linalg.norm(Q) * np.linalg.norm(X) + np.linalg.norm(P)
    if scale > 0 and resid > 1e-10 * scale:
        raise PoleError(f"q(T) is too ill-conditioned (relative residual {resid / scale:.2e})")
    return T.with_matrix(X)


# ---------------------------------------------------------------- matricial

class MatricialRational:
    """Square grid of rational functions, ``F = [f_ij]``."""

    def __init__(self, entries: Sequence[Sequence[RationalFunction]]):
        rows = [[_lift(f) for f in row] for row in entries]
        n = len(rows)
        if n < 1 or any(len(r) != n for r in rows):
            raise SpecsetError("a matricial rational function needs a square, nonempty grid")
        self.entries = rows

    @property
    def order(self) -> int:
        return len(self.entries)

    @classmethod
    def scalar(cls, f: RationalFunction) -> "MatricialRational":
        return cls([[f]])

    @classmethod
    def polynomial(cls, coeffs) -> "MatricialRational":
        """From a list of matrix coefficients ``C_0, C_1, ...`` (ascending)."""
        C = np.asarray(coeffs, dtype=np.complex128)
        n = C.shape[1]
        return cls([[RationalFunction.polynomial(C[:, i, j]) for j in range(n)] for i in range(n)])

    def __call__(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        n = self.order
        out = np.empty(z.shape + (n, n), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                out[..., i, j] = self.entries[i][j](z)
        return out


def rotation_polynomial() -> MatricialRational:
    """``F(z) = z / sqrt(2) * [[1, -1], [1, 1]]``; ``||F(z)|| = |z|``."""
    s = 1.0 / math.sqrt(2.0)
    z = lambda c: RationalFunction.polynomial([0.0, c])
    return MatricialRational([[z(s), z(-s)], [z(s), z(s)]])


def matricial_apply(F: MatricialRational, T: OperatorOnSpace, K: CompactRegion) -> OperatorOnSpace:
    """Block operator ``[f_ij(T)]`` on the ell_2 sum of ``F.order`` copies of the domain."""
    n = F.order
    blocks = [[rat_apply_operator(F.entries[i][j], T, K).matrix for j in range(n)] for i in range(n)]
    dom = Sum((T.domain,) * n, 2.0) if n > 1 else T.domain
    cod = Sum((T.codomain,) * n, 2.0) if n > 1 else T.codomain
    return OperatorOnSpace(np.block(blocks), dom, cod)


# ---------------------------------------------------------------- sup norms

def sup_norm_region(f: Union[RationalFunction, MatricialRational], K: CompactRegion,
                    boundary_points: int = DEFAULT_BOUNDARY_POINTS, interior_points: int = 64) -> float:
    """Grid estimate of ``sup_K |f|`` (largest singular value for matrices).

    Samples every boundary circle plus a small fixed interior grid, so the
    value is a lower bound of the true supremum.
    """
    entries = [f] if isinstance(f, RationalFunction) else [g for row in f.entries for g in row]
    for g in entries:
        check_no_poles(g, K)
    pts = np.concatenate([K.boundary_points(boundary_points), K.interior_points(interior_points)])
    if isinstance(f, RationalFunction):
        return float(np.max(np.abs(f(pts))))
    vals = f(pts)
    return float(np.max(np.linalg.svd(vals, compute_uv=False)[:, 0]))


# ---------------------------------------------------------------- checks

@dataclass(frozen=True)
class VNConfig:
    boundary_points: int = DEFAULT_BOUNDARY_POINTS
    interior_points: int = 64
    ascent: AscentConfig = field(default_factory=AscentConfig)


@dataclass(frozen=True)
class VNReport:
    """Outcome of ``||f(T)|| <= sup_K |f|``.

    ``lhs`` is a certified lower bound of ``||f(T)||`` and ``rhs`` a grid lower
    bound of the sup, so ``violated=True`` is a certificate (up to the grid)
    while ``violated=False`` is only evidence.
    """

    lhs: float
    rhs: float
    ratio: float
    violated: bool
    grid_points: int
    method_flags: dict

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio, "violated": self.violated,
                "grid_points": self.grid_points, "method_flags": dict(self.method_flags)}


def _report(est, rhs, cfg: VNConfig, extra_flags=None) -> VNReport:
    lhs = est.lower_bound
    ratio = lhs / rhs if rhs > 0 else (math.inf if lhs > 0 else 1.0)
    violated = lhs > rhs * (1 + 1e-9) + 1e-9
    flags = {"norm_method": est.method, "norm_exact": est.is_exact, "starts_used": est.starts_used}
    flags.update(extra_flags or {})
    return VNReport(lhs, rhs, ratio, violated, cfg.boundary_points, flags)


def vn_check(T: OperatorOnSpace, f: RationalFunction, K: CompactRegion,
             config: Optional[VNConfig] = None) -> VNReport:
    cfg = config or VNConfig()
    fT = rat_apply_operator(f, T, K)
    est = operator_norm(fT, cfg.ascent)
    rhs = sup_norm_region(f, K, cfg.boundary_points, cfg.interior_points)
    return _report(est, rhs, cfg)


def matricial_vn_check(T: OperatorOnSpace, F: MatricialRational, K: CompactRegion,
                       config: Optional[VNConfig] = None) -> VNReport:
    cfg = config or VNConfig()
    FT = matricial_apply(F, T, K)
    est = operator_norm(FT, cfg.ascent)
    rhs = sup_norm_region(F, K, cfg.boundary_points, cfg.interior_points)
    return _report(est, rhs, cfg, {"order": F.order})
