"""Norm-defect test for isometric dilatability.

For a strict contraction ``T`` the functional ``A_T(x) = (||x||^2 - ||Tx||^2)^(1/2)``
is always nonnegative and homogeneous. ``T`` dilates to an isometry exactly
when ``A_T`` also satisfies the triangle inequality, so a pair with
``A_T(x) + A_T(y) - A_T(x + y) < 0`` certifies that no isometric dilation
exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ContractionViolationError, SpecsetError
from .operators import OperatorOnSpace, brute_force_norm, operator_norm
from .spaces import (
    Leaf,
    Sum,
    as_vector,
    batch_norms,
    sample_unit_sphere_array,
    signed_basis_pairs,
)

CLAMP = 1e-12


@dataclass(frozen=True)
class DefectReport:
    min_defect: float
    witness_pair: tuple
    samples_used: int
    optimizer_refined: bool

    def to_dict(self) -> dict:
        enc = lambda v: [[float(z.real), float(z.imag)] for z in v]
        return {
            "min_defect": self.min_defect,
            "witness_pair": [enc(self.witness_pair[0]), enc(self.witness_pair[1])],
            "samples_used": self.samples_used,
            "optimizer_refined": self.optimizer_refined,
            "certifies_no_dilation": self.min_defect < -1e-8,
        }


def _a_values(T: OperatorOnSpace, X: np.ndarray) -> np.ndarray:
    nx = batch_norms(T.domain, X) ** 2
    ntx = batch_norms(T.codomain, X @ T.matrix.T) ** 2
    diff = nx - ntx
    floor = -CLAMP * np.maximum(1.0, nx)
    if np.any(diff < floor):
        i = int(np.argmin(diff - floor))
        raise ContractionViolationError(
            f"||Tx||^2 exceeds ||x||^2 by {-diff[i]:.3g}; T is not a contraction on this vector")
    return np.sqrt(np.maximum(diff, 0.0))


def a_functional(T: OperatorOnSpace, x) -> float:
    """``(||x||^2 - ||Tx||^2)^(1/2)``, clamping round-off below zero."""
    x = as_vector(T.domain, x)
    return float(_a_values(T, x[None, :])[0])


def defects(T: OperatorOnSpace, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Triangle defects ``A(x) + A(y) - A(x + y)`` for paired rows."""
    return _a_values(T, X) + _a_values(T, Y) - _a_values(T, X + Y)


def certify_strict_contraction(T: OperatorOnSpace, assume: bool = False) -> float:
    """Reject ``T`` unless it is (evidently) a strict contraction.

    Uses the exact norm when a closed form applies, the brute-force oracle on
    dimension <= 4, and otherwise trusts the caller's ``assume`` flag. Returns
    the norm value that was checked (``nan`` when assumed).
    """
    est = operator_norm(T)
    if est.lower_bound >= 1.0:
        raise ContractionViolationError(f"||T|| >= {est.lower_bound:.6g}; need a strict contraction")
    if est.is_exact:
        return est.lower_bound
    if T.dim <= 4:
        lb = brute_force_norm(T, resolution={1: 4, 2: 64, 3: 16, 4: 8}[T.dim])
        if lb >= 1.0:
            raise ContractionViolationError(f"||T|| >= {lb:.6g}; need a strict contraction")
        return max(lb, est.lower_bound)
    if not assume:
        raise ContractionViolationError(
            "cannot certify ||T|| < 1 for this space; pass assume_contraction=True if known")
    return math.nan


def norm_defect(T: OperatorOnSpace, samples: int = 10_000, seed: int = 0, refine: bool = True,
                assume_contraction: bool = False, refine_from: int = 8) -> DefectReport:
    """Smallest triangle defect of ``A_T`` found over unit-vector pairs.

    All signed/phased basis pairs are tried first, then ``samples`` random
    pairs; the best ``refine_from`` pairs are polished by coordinate descent
    on the unit sphere. ``min_defect < -1e-8`` certifies that ``T`` has no
    isometric dilation; a nonnegative value is evidence only.
    """
    certify_strict_contraction(T, assume_contraction)
    n = T.dim
    basis = list(signed_basis_pairs(n))
    X = [x for x, _ in basis]
    Y = [y for _, y in basis]
    if samples > 0:
        S = sample_unit_sphere_array(T.domain, 2 * samples, seed)
        X.extend(S[:samples])
        Y.extend(S[samples:])
    X = np.asarray(X, dtype=np.complex128).reshape(-1, n)
    Y = np.asarray(Y, dtype=np.complex128).reshape(-1, n)
    d = defects(T, X, Y)
    # stable sort: ties resolve to the earliest pair
    order = np.argsort(d, kind="stable")
    best_i = int(order[0])
    best = (float(d[best_i]), X[best_i], Y[best_i])
    refined = False
    if refine:
        for i in order[:refine_from]:
            val, x, y = _descend(T, X[i], Y[i], float(d[i]))
            if val < best[0]:
                best = (val, x, y)
                refined = True
    val, x, y = best
    val = float(defects(T, x[None, :], y[None, :])[0])
    return DefectReport(val, (x, y), int(X.shape[0]), refined)


def _descend(T: OperatorOnSpace, x, y, cur: float, step: float = 0.25, min_step: float = 1e-9,
             max_iter: int = 20_000):
    n = T.dim
    k = 4 * n
    moves = np.vstack([np.eye(k), -np.eye(k)])

    def unpack(P):
        Xs = P[:, :n] + 1j * P[:, n:2 * n]
        Ys = P[:, 2 * n:3 * n] + 1j * P[:, 3 * n:]
        nx = batch_norms(T.domain, Xs)
        ny = batch_norms(T.domain, Ys)
        ok = (nx > 0) & (ny > 0)
        Xs[ok] /= nx[ok, None]
        Ys[ok] /= ny[ok, None]
        return Xs, Ys, ok

    params = np.concatenate([x.real, x.imag, y.real, y.imag])
    for _ in range(max_iter):
        if step <= min_step:
            break
        trial = params[None, :] + step * moves
        Xs, Ys, ok = unpack(trial)
        vals = np.full(trial.shape[0], np.inf)
        vals[ok] = defects(T, Xs[ok], Ys[ok])
        j = int(np.argmin(vals))
        # rounding-level gains would otherwise keep the step from shrinking
        if vals[j] < cur - 1e-12 * (1 + abs(cur)):
            cur = float(vals[j])
            params = np.concatenate([Xs[j].real, Xs[j].imag, Ys[j].real, Ys[j].imag])
            step = min(2 * step, 0.25)
        else:
            step *= 0.5
    Xs, Ys, _ = unpack(params[None, :])
    return cur, Xs[0], Ys[0]


# ---------------------------------------------------------------- constructors

def make_T_lambda(lam: float) -> OperatorOnSpace:
    """``(x, y) -> lam (x + y, 0)`` on ``l1(2)``; its norm is ``lam``."""
    if not 0 < lam < 1:
        raise SpecsetError(f"lambda must lie in (0, 1), got {lam}")
    return OperatorOnSpace([[lam, lam], [0.0, 0.0]], Leaf(2, 1.0))


def make_T_r_block(r: float, hilbert_dim: int = 1) -> OperatorOnSpace:
    """``(h1, h2) -> (r h1, 0)`` on ``H (+)_1 H`` with ``H = l2(hilbert_dim)``."""
    if not 0 < r < 1:
        raise SpecsetError(f"r must lie in (0, 1), got {r}")
    if hilbert_dim < 1:
        raise SpecsetError("hilbert_dim must be >= 1")
    d = int(hilbert_dim)
    H = Leaf(d, 2.0)
    M = np.zeros((2 * d, 2 * d))
    M[:d, :d] = r * np.eye(d)
    return OperatorOnSpace(M, Sum((H, H), 1.0))


def make_S_mu(space, blocks: int, lam: float) -> OperatorOnSpace:
    """Diagonal weights ``(1, sqrt(1-lam^2), ...)`` per block; ``A_{S_lam} = ||S_mu x||``."""
    from .spaces import as_space

    space = as_space(space)
    d = space.total_dimension
    w = np.concatenate([np.ones(d), np.full(d * (blocks - 1), math.sqrt(1 - lam * lam))])
    return OperatorOnSpace(np.diag(w), Sum((space,) * blocks, 2.0))
