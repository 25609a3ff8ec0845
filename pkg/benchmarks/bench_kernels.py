"""Compiled vs numpy kernels: agreement and wall-clock speedup.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import itertools
import math
import time

import numpy as np

from specset.kernels import available_backends
from specset.operators import _balance, _simplex_grid
from specset.spaces import Leaf, Sum, batch_norms, parse_space

SPACES = ["l1(3)", "sum2(l1(2),linf(2))", "suminf(sum1(l2(2),l3(1)),l1.5(2),l2(1))"]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_tree_norms(backends, repeat, rows=200_000, calls=2_000, small=16):
    rng = np.random.default_rng(0)
    print(f"tree_norms, one batch of {rows} vectors")
    for text in SPACES:
        space = parse_space(text)
        n = space.total_dimension
        X = rng.standard_normal((rows, n)) + 1j * rng.standard_normal((rows, n))
        res = {name: best_of(lambda m=m: m.tree_norms(X, *space.plan), repeat) for name, m in backends.items()}
        report(text, res)
    # the descent and polish loops call the kernel many times on small batches
    print(f"tree_norms, {calls} calls on batches of {small}")
    for text in SPACES:
        space = parse_space(text)
        n = space.total_dimension
        X = rng.standard_normal((small, n)) + 1j * rng.standard_normal((small, n))
        res = {name: best_of(lambda m=m: [m.tree_norms(X, *space.plan) for _ in range(calls)][-1], repeat)
               for name, m in backends.items()}
        report(text, res)


def bench_sweep(backends, repeat):
    rng = np.random.default_rng(1)
    print("sweep_max, brute-force grid")
    for space, res_ in [(Leaf(3, 1.5), 24), (Sum((Leaf(1, 2.0), Leaf(2, 1.0)), math.inf), 24),
                        (Leaf(4, 3.0), 10)]:
        n = space.total_dimension
        M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        amps = np.unique(np.round(_balance(space, _simplex_grid(n, res_)), 15), axis=0)
        ticks = 2 * np.pi * np.arange(res_) / res_
        grid = np.array(list(itertools.product(ticks, repeat=n - 1)))
        phases = np.hstack([np.zeros((grid.shape[0], 1)), grid])
        dn = batch_norms(space, amps.astype(np.complex128))
        out = {name: best_of(lambda m=m: m.sweep_max(M, amps, phases, dn, *space.plan), repeat)
               for name, m in backends.items()}
        # compare attained maxima; argmax may differ on exact ties
        out = {k: (t, np.asarray(v[0])) for k, (t, v) in out.items()}
        report(f"{space} ({amps.shape[0]}x{phases.shape[0]} points)", out)


def report(label, res):
    ref_t, ref = res["python"]
    line = f"  {label:48s} python {ref_t * 1e3:9.2f} ms"
    for name, (t, val) in res.items():
        if name == "python":
            continue
        err = float(np.max(np.abs(np.asarray(val) - np.asarray(ref))))
        line += f" | {name} {t * 1e3:9.2f} ms  x{ref_t / t:6.1f}  max diff {err:.1e}"
    print(line)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; timing the numpy fallback only")
    bench_tree_norms(backends, args.repeat)
    bench_sweep(backends, args.repeat)


if __name__ == "__main__":
    main()
