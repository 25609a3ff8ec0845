import itertools
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import norm_trees
from specset import kernels
from specset.operators import _simplex_grid
from specset.spaces import Leaf

BACKENDS = kernels.available_backends()
needs_compiled = pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")


def test_python_backend_always_available():
    assert "python" in BACKENDS
    assert kernels.BACKEND in BACKENDS


def test_env_var_forces_fallback():
    env = dict(os.environ, SPECSET_KERNELS="python")
    out = subprocess.run([sys.executable, "-c", "import specset.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_compiled
@given(norm_trees(max_dim=3), st.integers(0, 1000))
def test_tree_norms_agree(tree, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((7, tree.total_dimension)) + 1j * rng.standard_normal((7, tree.total_dimension))
    a = BACKENDS["python"].tree_norms(X, *tree.plan)
    b = BACKENDS["compiled"].tree_norms(X, *tree.plan)
    assert np.allclose(a, b, rtol=1e-13, atol=0)


@needs_compiled
@given(norm_trees(max_leaves=2, max_dim=2), st.integers(0, 1000))
def test_sweep_max_agrees(tree, seed):
    n = tree.total_dimension
    if n < 2 or n > 4:
        return
    rng = np.random.default_rng(seed)
    T = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    amps = _simplex_grid(n, 5)
    grid = np.array(list(itertools.product(np.arange(6) * np.pi / 3, repeat=n - 1))).reshape(-1, n - 1)
    phases = np.hstack([np.zeros((grid.shape[0], 1)), grid])
    dom = BACKENDS["python"].tree_norms(amps.astype(np.complex128), *tree.plan)
    best_py, arg_py = BACKENDS["python"].sweep_max(T, amps, phases, dom, *tree.plan)
    best_c, arg_c = BACKENDS["compiled"].sweep_max(np.ascontiguousarray(T), amps, phases, dom, *tree.plan)
    assert np.allclose(best_py, best_c, rtol=1e-12)
    # indices may differ on ties, so compare the value each one attains
    for a in range(amps.shape[0]):
        if arg_c[a] < 0:
            assert arg_py[a] < 0
            continue
        x = amps[a] * np.exp(1j * phases[arg_c[a]])
        val = BACKENDS["python"].tree_norms((T @ x)[None, :], *tree.plan)[0] / dom[a]
        assert val == pytest.approx(best_py[a], rel=1e-12)


def test_zero_rows_are_flagged():
    plan = Leaf(2, 1).plan
    amps = np.array([[0.0, 0.0], [1.0, 0.0]])
    dom = np.array([0.0, 1.0])
    for impl in BACKENDS.values():
        best, arg = impl.sweep_max(np.eye(2, dtype=np.complex128), amps, np.zeros((1, 2)), dom, *plan)
        assert best[0] == -1 and arg[0] == -1
        assert best[1] == pytest.approx(1.0)
