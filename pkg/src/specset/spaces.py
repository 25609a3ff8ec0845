"""Finite-dimensional complex Banach spaces described as norm trees.

A space is either an ``ell_p`` leaf on ``dim`` coordinates or a ``p``-direct
sum of subspaces. Coordinates flatten depth-first, so a vector on
``Sum((Leaf(2, 1), Leaf(3, 2)), 2)`` is a length-5 complex array whose first
two entries live in the ``ell_1`` block.

Trees have a compact string form used by the CLI and JSON reports::

    l1(2)   l2(3)   linf(2)   l1.5(4)   sum2(l1(2),l1(2))   suminf(l2(1),l1(3))
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence, Union

import numpy as np

from . import kernels
from .errors import DimensionMismatchError, SpecsetError

INF = math.inf


def _check_p(p) -> float:
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise SpecsetError(f"p must lie in [1, inf], got {p}")
    return p


def conjugate_exponent(p: float) -> float:
    if p == 1.0:
        return INF
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


class NormPlan(NamedTuple):
    """Postorder array encoding of a tree, consumed by the kernels."""

    kind: np.ndarray
    p: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    cstart: np.ndarray
    cend: np.ndarray
    children: np.ndarray


class NormTree:
    """Common interface of :class:`Leaf` and :class:`Sum`."""

    p: float

    @property
    def total_dimension(self) -> int:
        raise NotImplementedError

    def __str__(self) -> str:
        return format_space(self)

    @cached_property
    def plan(self) -> NormPlan:
        kind, ps, lo, hi, cstart, cend, children = [], [], [], [], [], [], []

        def visit(node, offset):
            if isinstance(node, Leaf):
                kind.append(0)
                ps.append(node.p)
                lo.append(offset)
                hi.append(offset + node.dim)
                cstart.append(0)
                cend.append(0)
                return len(kind) - 1
            ids = []
            start = offset
            for child in node.children:
                ids.append(visit(child, offset))
                offset += child.total_dimension
            kind.append(1)
            ps.append(node.p)
            lo.append(start)
            hi.append(offset)
            cstart.append(len(children))
            children.extend(ids)
            cend.append(len(children))
            return len(kind) - 1

        visit(self, 0)
        i64 = lambda a: np.asarray(a, dtype=np.int64)
        return NormPlan(i64(kind), np.asarray(ps, dtype=np.float64), i64(lo), i64(hi),
                        i64(cstart), i64(cend), i64(children))

    @cached_property
    def canonical(self) -> "NormTree":
        """Isometric simplification that keeps coordinate order.

        One-dimensional leaves are exponent-free, single-child sums collapse,
        and a ``p``-sum of ``p``-leaves merges into one leaf.
        """
        return _canonicalize(self)

    def dual(self) -> "NormTree":
        """The tree of conjugate exponents; its norm is the dual norm."""
        if isinstance(self, Leaf):
            return Leaf(self.dim, conjugate_exponent(self.p))
        return Sum(tuple(c.dual() for c in self.children), conjugate_exponent(self.p))

    def is_leaf_with(self, p: float) -> bool:
        """True if the canonical form is a single leaf whose norm is ell_p."""
        c = self.canonical
        return isinstance(c, Leaf) and (c.dim == 1 or c.p == p)

    def is_hilbert(self) -> bool:
        return self.canonical.is_leaf_with(2.0)


@dataclass(frozen=True, eq=True)
class Leaf(NormTree):
    dim: int
    p: float = 2.0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise SpecsetError(f"leaf dimension must be a positive integer, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "p", _check_p(self.p))

    @property
    def total_dimension(self) -> int:
        return self.dim


@dataclass(frozen=True, eq=True)
class Sum(NormTree):
    children: tuple
    p: float = 2.0

    def __post_init__(self):
        kids = tuple(self.children)
        if not kids:
            raise SpecsetError("a direct sum needs at least one summand")
        for c in kids:
            if not isinstance(c, NormTree):
                raise SpecsetError(f"summand {c!r} is not a norm tree")
        object.__setattr__(self, "children", kids)
        object.__setattr__(self, "p", _check_p(self.p))

    @cached_property
    def _dim(self) -> int:
        return sum(c.total_dimension for c in self.children)

    @property
    def total_dimension(self) -> int:
        return self._dim


def direct_sum(space: NormTree, copies: int, p: float = 2.0) -> Sum:
    """``space (+)_p space (+)_p ... `` with ``copies`` summands."""
    if copies < 1:
        raise SpecsetError("need at least one copy")
    return Sum((space,) * copies, p)


def _canonicalize(node: NormTree) -> NormTree:
    if isinstance(node, Leaf):
        return node
    kids = [_canonicalize(c) for c in node.children]
    if len(kids) == 1:
        return kids[0]
    if all(isinstance(c, Leaf) and (c.dim == 1 or c.p == node.p) for c in kids):
        return Leaf(sum(c.dim for c in kids), node.p)
    return Sum(tuple(kids), node.p)


# ---------------------------------------------------------------- grammar

_NUM = r"(?:inf|\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)"
_TOKEN = re.compile(rf"\s*(?:(?P<sum>sum)(?P<sp>{_NUM})\(|(?P<leaf>l)(?P<lp>{_NUM})\((?P<dim>\d+)\)|(?P<comma>,)|(?P<close>\)))")


def _format_p(p: float) -> str:
    if math.isinf(p):
        return "inf"
    if float(p).is_integer():
        return str(int(p))
    return repr(float(p))


def format_space(tree: NormTree) -> str:
    if isinstance(tree, Leaf):
        return f"l{_format_p(tree.p)}({tree.dim})"
    return f"sum{_format_p(tree.p)}(" + ",".join(format_space(c) for c in tree.children) + ")"


def parse_space(text: str) -> NormTree:
    """Parse the compact grammar, e.g. ``"sum2(l1(2),l1(2))"``."""
    pos = 0
    stack: list[tuple[float, list]] = []
    result = None

    def fail(msg):
        raise SpecsetError(f"bad space string {text!r} at {pos}: {msg}")

    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            fail("unexpected character")
        pos = m.end()
        if m.group("sum"):
            stack.append((float(m.group("sp")), []))
        elif m.group("leaf"):
            node = Leaf(int(m.group("dim")), float(m.group("lp")))
            if stack:
                stack[-1][1].append(node)
            elif result is None:
                result = node
            else:
                fail("trailing content")
        elif m.group("comma"):
            if not stack:
                fail("comma outside a sum")
        else:
            if not stack:
                fail("unbalanced ')'")
            p, kids = stack.pop()
            node = Sum(tuple(kids), p)
            if stack:
                stack[-1][1].append(node)
            elif result is None:
                result = node
            else:
                fail("trailing content")
    if stack or result is None:
        fail("incomplete expression")
    return result


def as_space(space: Union[NormTree, str]) -> NormTree:
    return parse_space(space) if isinstance(space, str) else space


# ---------------------------------------------------------------- vectors

def as_vector(space: NormTree, v) -> np.ndarray:
    """Validate a coordinate vector for ``space`` and return it as complex128."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1:
        raise SpecsetError(f"vector must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] != space.total_dimension:
        raise DimensionMismatchError(space.total_dimension, arr.shape[0])
    if not np.all(np.isfinite(arr)):
        raise SpecsetError("vector has non-finite entries")
    return arr


def vector_norm(space: NormTree, v) -> float:
    """Recursive p-norm of ``v``: leaves take coordinate p-norms, sums take
    the p-norm of their children's norms."""
    arr = as_vector(space, v)
    return float(kernels.tree_norms(arr[None, :], space.plan)[0])


def batch_norms(space: NormTree, X) -> np.ndarray:
    """Norms of each row of ``X`` (shape ``(m, dim)``)."""
    X = np.ascontiguousarray(X, dtype=np.complex128)
    if X.ndim != 2 or X.shape[1] != space.total_dimension:
        raise DimensionMismatchError(space.total_dimension, X.shape[-1] if X.ndim else 0, "batch")
    if X.shape[0] == 0:
        return np.zeros(0)
    return np.asarray(kernels.tree_norms(X, space.plan))


def _unit_phase(h: np.ndarray) -> np.ndarray:
    mag = np.abs(h)
    out = np.ones_like(h)
    nz = mag > 0
    out[nz] = np.conj(h[nz]) / mag[nz]
    return out


def _real_maximizer(d: np.ndarray, p: float) -> np.ndarray:
    """Nonnegative t with ||t||_p = 1 maximizing <t, d> for d >= 0."""
    k = d.shape[0]
    if p == 1.0:
        t = np.zeros(k)
        t[int(np.argmax(d))] = 1.0
        return t
    if math.isinf(p):
        return np.ones(k)
    q = conjugate_exponent(p)
    m = d.max()
    if m <= 0:
        return np.full(k, k ** (-1.0 / p))
    w = np.power(d / m, q - 1.0)
    return w / np.power(np.power(w, p).sum(), 1.0 / p)


def linear_maximizer(space: NormTree, h) -> np.ndarray:
    """A unit vector ``x`` maximizing ``Re sum_j h_j x_j``.

    The maximum equals the dual norm of ``h``. With ``h`` a norming functional
    this is one step of the generalized power method.
    """
    h = np.asarray(h, dtype=np.complex128)

    def solve(node, block):
        if isinstance(node, Leaf):
            t = _real_maximizer(np.abs(block), node.p)
            return t * _unit_phase(block), _leaf_norm(np.abs(block), conjugate_exponent(node.p))
        parts, duals, off = [], [], 0
        for child in node.children:
            n = child.total_dimension
            x, d = solve(child, block[off:off + n])
            parts.append(x)
            duals.append(d)
            off += n
        duals = np.asarray(duals)
        t = _real_maximizer(duals, node.p)
        x = np.concatenate([ti * xi for ti, xi in zip(t, parts)])
        return x, _leaf_norm(duals, conjugate_exponent(node.p))

    x, _ = solve(space, h)
    return x


def norming_functional(space: NormTree, v) -> np.ndarray:
    """``y`` of dual norm one with ``sum_i y_i v_i = ||v||``."""
    return linear_maximizer(space.dual(), v)


def _leaf_norm(a: np.ndarray, p: float) -> float:
    from ._kernels_py import pnorm_rows

    return float(pnorm_rows(np.asarray(a, dtype=float)[None, :], p)[0])


def basis_vector(space: NormTree, index: int, phase: complex = 1.0) -> np.ndarray:
    e = np.zeros(space.total_dimension, dtype=np.complex128)
    e[index] = phase
    return e


def sample_unit_sphere(space: NormTree, count: int, seed: int = 0) -> list:
    """``count`` vectors of norm one, from normalized complex Gaussians."""
    return list(sample_unit_sphere_array(space, count, seed))


def sample_unit_sphere_array(space: NormTree, count: int, seed: int = 0) -> np.ndarray:
    n = space.total_dimension
    if n < 1:
        raise SpecsetError("cannot sample the sphere of a zero-dimensional space")
    if count <= 0:
        return np.zeros((0, n), dtype=np.complex128)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    norms = batch_norms(space, X)
    # a Gaussian draw is a.s. nonzero; redraw defensively anyway
    while np.any(norms == 0):
        bad = norms == 0
        X[bad] = rng.standard_normal((bad.sum(), n)) + 1j * rng.standard_normal((bad.sum(), n))
        norms = batch_norms(space, X)
    return X / norms[:, None]


def signed_basis_pairs(n: int, phases: Sequence[complex] = (1, -1, 1j, -1j)):
    """Deterministic pairs ``(e_i, s e_j)`` with ``i <= j``."""
    for i in range(n):
        for j in range(i, n):
            for s in phases:
                if i == j and s == 1:
                    continue
                x = np.zeros(n, dtype=np.complex128)
                y = np.zeros(n, dtype=np.complex128)
                x[i] = 1.0
                y[j] = s
                yield x, y
