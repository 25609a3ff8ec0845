"""Numerical probes that can certify a norm tree is *not* a Hilbert space.

Each probe either finds a witness (a certificate of non-Hilbertness up to
round-off) or finds none, which is evidence but not proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .calculus import CompactRegion, matricial_apply, rotation_polynomial
from .errors import SpecsetError
from .operators import AscentConfig, OperatorOnSpace, identity, operator_norm, spectrum
from .spaces import (
    NormTree,
    Sum,
    as_space,
    batch_norms,
    sample_unit_sphere_array,
    signed_basis_pairs,
    vector_norm,
)

DISK = CompactRegion.disk(1.0)


def _pairs(space: NormTree, samples: int, seed: int):
    n = space.total_dimension
    base = list(signed_basis_pairs(n))
    X = np.array([x for x, _ in base], dtype=np.complex128).reshape(-1, n)
    Y = np.array([y for _, y in base], dtype=np.complex128).reshape(-1, n)
    if samples > 0:
        S = sample_unit_sphere_array(space, 2 * samples, seed)
        X = np.vstack([X, S[:samples]])
        Y = np.vstack([Y, S[samples:]])
    return X, Y


def parallelogram_defect(space, samples: int = 1000, seed: int = 0) -> float:
    """Largest relative parallelogram-law defect
    ``|‖x+y‖² + ‖x−y‖² − 2(‖x‖² + ‖y‖²)| / (‖x‖² + ‖y‖²)`` over the sampled pairs."""
    space = as_space(space)
    if samples < 0:
        raise SpecsetError("samples must be nonnegative")
    X, Y = _pairs(space, samples, seed)
    if X.shape[0] == 0:
        return 0.0
    nx = batch_norms(space, X) ** 2
    ny = batch_norms(space, Y) ** 2
    num = batch_norms(space, X + Y) ** 2 + batch_norms(space, X - Y) ** 2 - 2 * (nx + ny)
    return float(np.max(np.abs(num) / (nx + ny)))


@dataclass(frozen=True)
class RotationResult:
    norm_lb: float
    passes: bool
    method: str

    def to_dict(self):
        return {"norm_lb": self.norm_lb, "passes": self.passes, "method": self.method}


def rotation_test(space, config: Optional[AscentConfig] = None) -> RotationResult:
    """Norm of ``F(I) = [[I, -I], [I, I]] / sqrt(2)`` on ``X (+)_2 X``.

    ``sup |F| = 1`` on the closed disk, so ``norm_lb > 1 + 1e-8`` certifies
    the disk is not a complete spectral set for the identity, which happens
    only for non-Hilbert ``X``.
    """
    space = as_space(space)
    FI = matricial_apply(rotation_polynomial(), identity(space), DISK)
    est = operator_norm(FI, config)
    return RotationResult(est.lower_bound, est.lower_bound <= 1 + 1e-8, est.method)


def symmetry_violation(space: NormTree, x, y, a: float, b: float) -> float:
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    return abs(vector_norm(space, a * x + b * y) - vector_norm(space, b * x + a * y))


def _skew_pairs(n: int):
    """Deterministic unequal-pattern pairs (e_i, normalized e_j + t e_k)."""
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if j == k:
                    continue
                for t in (0.5, 0.75, -0.5, 0.5j):
                    y = np.zeros(n, dtype=np.complex128)
                    y[j] += 1.0
                    y[k] += t
                    x = np.zeros(n, dtype=np.complex128)
                    x[i] = 1.0
                    yield x, y


def symmetry_test(space, samples: int = 10_000, seed: int = 0) -> float:
    """Largest ``| ‖ax+by‖ − ‖bx+ay‖ |`` over pairs rescaled to unit norm and
    random real ``a, b``. Inner-product norms give zero on every pair."""
    space = as_space(space)
    n = space.total_dimension
    X, Y = _pairs(space, samples, seed)
    skew = list(_skew_pairs(n)) if n <= 8 else []
    if skew:
        X = np.vstack([X, np.array([p[0] for p in skew])])
        Y = np.vstack([Y, np.array([p[1] for p in skew])])
    nx = batch_norms(space, X)
    ny = batch_norms(space, Y)
    X = X / nx[:, None]
    Y = Y / ny[:, None]
    rng = np.random.default_rng(seed + 1)
    ab = rng.standard_normal((X.shape[0], 2))
    a, b = ab[:, :1], ab[:, 1:]
    v = np.abs(batch_norms(space, a * X + b * Y) - batch_norms(space, b * X + a * Y))
    return float(v.max())


@dataclass(frozen=True)
class MobiusProbeResult:
    lhs: float
    rhs: float
    violated: bool
    alpha: complex
    witness: Optional[np.ndarray]

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else math.inf

    def to_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "violated": self.violated,
                "alpha": [self.alpha.real, self.alpha.imag], "ratio": self.ratio}


def alpha_grid(count: int = 64) -> np.ndarray:
    """``count`` points of the open unit disk: 4 radii times equispaced angles."""
    radii = (0.25, 0.5, 0.75, 0.9)
    per = max(1, count // len(radii))
    theta = 2 * np.pi * np.arange(per) / per
    return np.concatenate([r * np.exp(1j * theta) for r in radii])


def _pattern_seeds(T: OperatorOnSpace, B: np.ndarray) -> list:
    """Starts ``B x0`` with ``x0 = (0, x, y, 0, ...)`` over the top-level blocks,
    ``||x|| = ||y||``."""
    dom = T.domain
    if not isinstance(dom, Sum) or len(dom.children) < 3:
        return []
    inner = dom.children[1]
    if dom.children[2] != inner:
        return []
    d = inner.total_dimension
    c = [ch.total_dimension for ch in dom.children]
    off1, off2 = c[0], c[0] + c[1]
    cands = [np.eye(d, dtype=np.complex128)[i] for i in range(d)]
    if d >= 2:
        v = np.zeros(d, dtype=np.complex128)
        v[0], v[1] = 1.0, 1.0
        cands.append(v)
        w = np.zeros(d, dtype=np.complex128)
        w[0], w[1] = 1.0, -1.0
        cands.append(w)
    cands = [u / vector_norm(inner, u) for u in cands]
    seeds = []
    for x in cands:
        for y in cands:
            x0 = np.zeros(T.dim, dtype=np.complex128)
            x0[off1:off1 + d] = x
            x0[off2:off2 + d] = y
            seeds.append(B @ x0)
    return seeds


def mobius_contraction_probe(T: OperatorOnSpace, alpha: Optional[complex] = None,
                             config: Optional[AscentConfig] = None, seed: int = 0,
                             alphas: Optional[Sequence[complex]] = None,
                             stop_on_violation: bool = False) -> MobiusProbeResult:
    """Search for ``x`` with ``‖(T − αI)x‖ > ‖(I − conj(α) T)x‖``.

    Substituting ``x = (I − conj(α) T)^{-1} u`` turns the search into the norm
    of the Möbius transform ``φ_α(T)``; a value above one is a violation and
    certifies the closed disk is not a spectral set for ``T``. With no
    ``alpha`` the 64-point disk grid is swept and the worst case returned
    (or the first violation, with ``stop_on_violation``).
    """
    ev = spectrum(T)
    if ev.size and np.max(np.abs(ev)) >= 1:
        raise SpecsetError("the spectrum of T must lie in the open unit disk")
    if alpha is not None:
        if abs(alpha) >= 1:
            raise SpecsetError(f"alpha must lie in the open unit disk, got {alpha}")
        grid = [complex(alpha)]
    else:
        grid = [complex(a) for a in (alphas if alphas is not None else alpha_grid())]
    cfg = config or AscentConfig(starts=4, seed=seed)
    I = np.eye(T.dim)
    best: Optional[MobiusProbeResult] = None
    for a in grid:
        A = T.matrix - a * I
        B = I - np.conj(a) * T.matrix
        phi = OperatorOnSpace(A @ np.linalg.inv(B), T.domain, T.codomain)
        est = operator_norm(phi, cfg, extra_starts=_pattern_seeds(T, B))
        x = np.linalg.solve(B, est.witness)
        lhs = vector_norm(T.codomain, A @ x)
        rhs = vector_norm(T.codomain, B @ x)
        res = MobiusProbeResult(lhs, rhs, lhs > rhs * (1 + 1e-9) + 1e-12, a, x)
        if best is None or res.ratio > best.ratio:
            best = res
        if res.violated and stop_on_violation:
            break
    return best
