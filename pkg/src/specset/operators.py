"""Matrices acting between norm trees.

Induced norms are exact where a closed form applies (ell_1 domains, ell_inf
codomains, ell_2 to ell_2) and otherwise come from a multi-start ascent on the
domain unit sphere. Either way the returned value is a lower bound of the true
norm, and ``brute_force_norm`` provides an independent grid oracle for
dimensions up to four.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import DimensionMismatchError, SpecsetError
from .spaces import (
    Leaf,
    NormTree,
    Sum,
    as_space,
    batch_norms,
    format_space,
    linear_maximizer,
    norming_functional,
    parse_space,
    sample_unit_sphere_array,
    vector_norm,
)

EXACT_METHODS = ("exact_l1_columns", "exact_linf_rows", "exact_l2_svd")


@dataclass(frozen=True)
class NormEstimate:
    lower_bound: float
    method: str
    is_exact: bool
    starts_used: int = 0
    witness: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def to_dict(self) -> dict:
        return {
            "lower_bound": self.lower_bound,
            "method": self.method,
            "is_exact": self.is_exact,
            "starts_used": self.starts_used,
        }


@dataclass(frozen=True)
class AscentConfig:
    """Multi-start ascent settings.

    Each start iterates the norm-dual ascent step with step halving until the
    relative improvement drops below ``rel_tol`` or ``max_iter`` is reached.
    Signed basis vectors are always tried in addition to ``starts`` random
    points (up to ``max_basis_starts`` of them).
    """

    starts: int = 32
    max_iter: int = 500
    rel_tol: float = 1e-10
    seed: int = 0
    max_basis_starts: int = 64


class OperatorOnSpace:
    """A complex square matrix bound to a domain and codomain norm tree."""

    def __init__(self, matrix, domain, codomain=None):
        domain = as_space(domain)
        codomain = domain if codomain is None else as_space(codomain)
        M = np.array(matrix, dtype=np.complex128)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise SpecsetError(f"operator matrix must be square, got shape {M.shape}")
        if M.shape[1] != domain.total_dimension:
            raise DimensionMismatchError(domain.total_dimension, M.shape[1], "matrix")
        if M.shape[0] != codomain.total_dimension:
            raise DimensionMismatchError(codomain.total_dimension, M.shape[0], "matrix")
        if not np.all(np.isfinite(M)):
            raise SpecsetError("operator matrix has non-finite entries")
        M.setflags(write=False)
        self.matrix = M
        self.domain = domain
        self.codomain = codomain
        self.cached_norm: Optional[NormEstimate] = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"OperatorOnSpace(dim={self.dim}, domain={self.domain}, codomain={self.codomain})"

    def __call__(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=np.complex128)

    def with_matrix(self, matrix) -> "OperatorOnSpace":
        return OperatorOnSpace(matrix, self.domain, self.codomain)

    def __matmul__(self, other: "OperatorOnSpace") -> "OperatorOnSpace":
        return OperatorOnSpace(self.matrix @ other.matrix, other.domain, self.codomain)

    def scaled(self, c: complex) -> "OperatorOnSpace":
        return self.with_matrix(c * self.matrix)

    def to_json(self) -> dict:
        return {
            "domain": format_space(self.domain),
            "codomain": format_space(self.codomain),
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix],
        }

    @classmethod
    def from_json(cls, data: dict) -> "OperatorOnSpace":
        M = np.array([[complex(re, im) for re, im in row] for row in data["matrix"]])
        return cls(M, parse_space(data["domain"]), parse_space(data.get("codomain", data["domain"])))


def identity(space) -> OperatorOnSpace:
    space = as_space(space)
    return OperatorOnSpace(np.eye(space.total_dimension), space)


def zero_operator(space) -> OperatorOnSpace:
    space = as_space(space)
    n = space.total_dimension
    return OperatorOnSpace(np.zeros((n, n)), space)


# ---------------------------------------------------------------- norms

def operator_norm(T: OperatorOnSpace, config: Optional[AscentConfig] = None,
                  extra_starts: Optional[Sequence] = None) -> NormEstimate:
    """Induced norm of ``T`` as a certified lower bound.

    Closed forms: an ell_1 domain gives the largest codomain norm of a column;
    an ell_inf codomain gives the largest dual-domain norm of a row; ell_2 to
    ell_2 gives the top singular value. Anything else goes to ascent.
    """
    use_cache = config is None and extra_starts is None
    if use_cache and T.cached_norm is not None:
        return T.cached_norm
    est = _exact_norm(T)
    if est is None:
        est = _ascent_norm(T, config or AscentConfig(), extra_starts)
    if use_cache:
        T.cached_norm = est
    return est


def _exact_norm(T: OperatorOnSpace) -> Optional[NormEstimate]:
    M = T.matrix
    n = M.shape[1]
    if T.domain.is_leaf_with(1.0):
        cols = batch_norms(T.codomain, M.T)
        j = int(np.argmax(cols))
        e = np.zeros(n, dtype=np.complex128)
        e[j] = 1.0
        return NormEstimate(float(cols[j]), "exact_l1_columns", True, 0, e)
    if T.codomain.is_leaf_with(math.inf):
        rows = batch_norms(T.domain.dual(), M)
        i = int(np.argmax(rows))
        return NormEstimate(float(rows[i]), "exact_linf_rows", True, 0, linear_maximizer(T.domain, M[i]))
    if T.domain.is_leaf_with(2.0) and T.codomain.is_leaf_with(2.0):
        _, s, vh = np.linalg.svd(M)
        return NormEstimate(float(s[0]), "exact_l2_svd", True, 0, np.conj(vh[0]))
    return None


def _ascent_norm(T: OperatorOnSpace, cfg: AscentConfig, extra_starts) -> NormEstimate:
    dom, cod, M = T.domain, T.codomain, T.matrix
    n = M.shape[1]
    starts = []
    if n <= cfg.max_basis_starts:
        starts.extend(np.eye(n, dtype=np.complex128))
    if extra_starts is not None:
        starts.extend(np.asarray(s, dtype=np.complex128) for s in extra_starts)
    starts.extend(sample_unit_sphere_array(dom, cfg.starts, cfg.seed))

    best_val, best_x = -1.0, None
    for x0 in starts:
        val, x = _ascend(M, dom, cod, x0, cfg)
        # strict comparison keeps the earliest start on ties
        if val > best_val:
            best_val, best_x = val, x
    return NormEstimate(max(best_val, 0.0), "ascent", False, len(starts), best_x)


def _ratio(M, dom, cod, x) -> float:
    nx = vector_norm(dom, x)
    if nx == 0.0:
        return 0.0
    return vector_norm(cod, M @ x) / nx


def _ascend(M, dom, cod, x0, cfg: AscentConfig):
    nx = vector_norm(dom, x0)
    if nx == 0.0:
        return 0.0, x0
    x = x0 / nx
    val = vector_norm(cod, M @ x)
    for _ in range(cfg.max_iter):
        y = M @ x
        if val == 0.0:
            break
        grad = M.T @ norming_functional(cod, y)
        target = linear_maximizer(dom, grad)
        eta, moved = 1.0, False
        for _ in range(40):
            cand = x + eta * (target - x)
            c_norm = vector_norm(dom, cand)
            if c_norm > 0.0:
                cand = cand / c_norm
                c_val = vector_norm(cod, M @ cand)
                if c_val > val:
                    moved = True
                    break
            eta *= 0.5
        if not moved:
            break
        gain = c_val - val
        x, val = cand, c_val
        if gain <= cfg.rel_tol * val:
            break
    return val, x


_DEFAULT_RESOLUTION = {1: 4, 2: 256, 3: 40, 4: 16}


def _simplex_grid(n: int, res: int) -> np.ndarray:
    rows = []
    for bars in itertools.combinations(range(res + n - 1), n - 1):
        parts, prev = [], -1
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(res + n - 2 - prev)
        rows.append(parts)
    return np.asarray(rows, dtype=np.float64) / res


def brute_force_norm(T: OperatorOnSpace, resolution: Optional[int] = None,
                     refine: bool = True, candidates: int = 8) -> float:
    """Grid oracle for ``||T||`` on domains of dimension at most four.

    Sweeps amplitude vectors on the simplex (``resolution`` steps) times a
    phase grid (first phase fixed, since norms ignore a global phase), then
    polishes the best ``candidates`` grid points with a compass search in the
    same amplitude/phase coordinates. The result is a lower bound that
    converges to the norm as the resolution grows.

    ``||Tx||`` is convex, so its maximum over the ball sits at an extreme
    point. Amplitudes are therefore balanced before evaluation: ell_inf leaves
    get unit moduli and the summands of an ell_inf sum get equal norms. This
    removes the nonsmooth ridges the polish step would otherwise stall on.
    """
    n = T.dim
    if n > 4:
        raise SpecsetError(f"brute force is limited to dimension <= 4 (got {n}); use operator_norm ascent")
    res = int(resolution or _DEFAULT_RESOLUTION[n])
    if res < 1:
        raise SpecsetError("resolution must be positive")
    amps = _balance(T.domain, _simplex_grid(n, res))
    amps = np.unique(np.round(amps, 15), axis=0)
    if n == 1:
        phases = np.zeros((1, 1))
    else:
        ticks = 2 * np.pi * np.arange(res) / res
        grid = np.array(list(itertools.product(ticks, repeat=n - 1)))
        phases = np.hstack([np.zeros((grid.shape[0], 1)), grid])
    dom_norms = batch_norms(T.domain, amps.astype(np.complex128))
    best, arg = kernels.sweep_max(T.matrix, amps, phases, dom_norms, T.codomain.plan)
    best = np.asarray(best)
    top = float(best.max())
    if not refine or n == 1 or top <= 0.0:
        return max(top, 0.0)
    order = np.argsort(-best, kind="stable")[:candidates]
    for a in order:
        if best[a] <= 0:
            continue
        params = np.concatenate([amps[a], phases[arg[a], 1:]])
        top = max(top, _compass(T, params, 1.0 / res, 2 * np.pi / res))
    return top


def _balance(space: NormTree, amps: np.ndarray) -> np.ndarray:
    # Raise each ell_inf node to an extreme point of the ball of its own
    # current norm; a node that is zero stays zero so outer ell_1 sums can
    # still put all their weight elsewhere.
    plan = space.plan
    out = np.array(amps, dtype=np.float64)
    for k in range(len(plan.kind)):
        if not np.isinf(plan.p[k]):
            continue
        lo, hi = plan.lo[k], plan.hi[k]
        if plan.kind[k] == 0:
            out[:, lo:hi] = out[:, lo:hi].max(axis=1, keepdims=True)
            continue
        kids = plan.children[plan.cstart[k]:plan.cend[k]]
        norms = [batch_norms(_subtree(space, c), out[:, plan.lo[c]:plan.hi[c]].astype(np.complex128))
                 for c in kids]
        top = np.max(norms, axis=0)
        for c, nc in zip(kids, norms):
            clo, chi = plan.lo[c], plan.hi[c]
            block = out[:, clo:chi].copy()
            empty = nc <= 0
            block[empty] = 1.0
            nc = np.where(empty, batch_norms(_subtree(space, c), block.astype(np.complex128)), nc)
            out[:, clo:chi] = block * (top / nc)[:, None]
    return out


def _subtree(space: NormTree, index: int) -> NormTree:
    """The node at postorder position ``index`` of ``space.plan``."""
    nodes = []

    def visit(node):
        if isinstance(node, Sum):
            for c in node.children:
                visit(c)
        nodes.append(node)

    visit(space)
    return nodes[index]


_COMPASS_MAX_ITER = 500


def _compass(T: OperatorOnSpace, params: np.ndarray, amp_step: float, phase_step: float) -> float:
    n = T.dim
    k = params.shape[0]

    def evaluate(P):
        amps = _balance(T.domain, np.abs(P[:, :n]))
        ph = np.hstack([np.zeros((P.shape[0], 1)), P[:, n:]])
        X = amps * np.exp(1j * ph)
        dn = batch_norms(T.domain, X)
        cn = batch_norms(T.codomain, X @ T.matrix.T)
        return np.where(dn > 0, cn / np.where(dn > 0, dn, 1.0), 0.0)

    steps = np.array([amp_step] * n + [phase_step] * (k - n))
    cur = evaluate(params[None, :])[0]
    # axis moves plus pairwise diagonals, so ridges of max-type norms are not a trap
    dirs = [row for row in np.eye(k)]
    for i, j in itertools.combinations(range(k), 2):
        for s in (1.0, -1.0):
            d = np.zeros(k)
            d[i], d[j] = 1.0, s
            dirs.append(d)
    directions = np.vstack(dirs + [-d for d in dirs])
    top = steps.copy()
    for _ in range(_COMPASS_MAX_ITER):
        if steps.max() <= 1e-12:
            break
        trial = params[None, :] + directions * steps[None, :]
        vals = evaluate(trial)
        j = int(np.argmax(vals))
        # rounding-level gains would otherwise keep the step from shrinking
        if vals[j] > cur * (1 + 1e-12):
            cur, params = float(vals[j]), trial[j]
            steps = np.minimum(2 * steps, top)
        else:
            steps = steps * 0.5
    return cur


# ---------------------------------------------------------------- spectra

def spectrum(T) -> np.ndarray:
    """All eigenvalues with multiplicity.

    Triangular matrices return their diagonal exactly; this matters for the
    nilpotent shifts, whose eigenvalues a dense solver perturbs by roughly
    eps**(1/n).
    """
    M = T.matrix if isinstance(T, OperatorOnSpace) else np.asarray(T, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise SpecsetError(f"spectrum needs a square matrix, got shape {M.shape}")
    if not np.any(np.tril(M, -1)) or not np.any(np.triu(M, 1)):
        return np.diag(M).astype(np.complex128)
    return np.linalg.eigvals(M)


def spectral_radius(T) -> float:
    ev = spectrum(T)
    return float(np.max(np.abs(ev))) if ev.size else 0.0


# ---------------------------------------------------------------- shifts

def _shift_matrix(d: int, blocks: int, scale: float, offset: int) -> np.ndarray:
    return scale * np.kron(np.eye(blocks, k=offset), np.eye(d))


def _check_shift_args(blocks, scale):
    if int(blocks) != blocks or blocks < 2:
        raise SpecsetError(f"a shift needs at least 2 blocks, got {blocks}")
    if scale < 0:
        raise SpecsetError(f"shift scale must be nonnegative, got {scale}")


def forward_shift(inner, blocks: int, scale: float = 1.0, outer_p: float = 2.0) -> OperatorOnSpace:
    """``scale * M_z`` on ``inner (+)_p ... (+)_p inner`` (``blocks`` copies):
    ``(a_0, ..., a_{N-1}) -> scale * (0, a_0, ..., a_{N-2})``."""
    inner = as_space(inner)
    _check_shift_args(blocks, scale)
    space = Sum((inner,) * int(blocks), outer_p)
    return OperatorOnSpace(_shift_matrix(inner.total_dimension, int(blocks), scale, -1), space)


def backward_shift(inner, blocks: int, scale: float = 1.0, outer_p: float = 2.0) -> OperatorOnSpace:
    """``(a_0, a_1, ..., a_{N-1}) -> scale * (a_1, ..., a_{N-1}, 0)``."""
    inner = as_space(inner)
    _check_shift_args(blocks, scale)
    space = Sum((inner,) * int(blocks), outer_p)
    return OperatorOnSpace(_shift_matrix(inner.total_dimension, int(blocks), scale, 1), space)


def scalar_shift(n: int, scale: float = 1.0, p: float = 1.0) -> OperatorOnSpace:
    """``scale * M_z`` on the single leaf ``l_p(n)``."""
    if n < 2:
        raise SpecsetError("need n >= 2")
    return OperatorOnSpace(scale * np.eye(n, k=-1), Leaf(n, p))
