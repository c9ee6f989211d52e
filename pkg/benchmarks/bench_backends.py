"""Benchmark the numba kernels against their pure-numpy fallbacks.

Runs each hot kernel on a representative workload under both backends and
prints the timings and speedups.  Invoke from the repository root:

    python benchmarks/bench_backends.py
"""

import time

import numpy as np

from copolyap import _kernels
from copolyap._vertex_tuples import tuple_index_array


def timeit(fn, *args, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def workload_simulate():
    exps = np.array([[1, 0], [0, 1]], dtype=np.int64)
    coefs = np.array([[-1.0, -2.0], [-1.0, -1.0]])
    return (exps, coefs, np.array([1.0, 1.0]), 1e-4, 200_000, 1e12, 1e-9)


def workload_eval_many():
    rng = np.random.default_rng(0)
    exps = rng.integers(0, 5, (20, 3)).astype(np.int64)
    coefs = rng.uniform(-1, 1, 20)
    pts = rng.uniform(0, 1, (200_000, 3))
    return (exps, coefs, pts)


def workload_fold():
    rng = np.random.default_rng(1)
    n, order, p, cells = 3, 6, 3, 4096
    dense = rng.uniform(-1, 1, (8, n**order))
    verts = rng.uniform(0, 1, (cells, p, n))
    flat = tuple_index_array(p, order)
    return (dense, verts, order, flat)


def workload_lp():
    rng = np.random.default_rng(2)
    m, n = 400, 500
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = rng.uniform(-1, 1, (m, n))
    tab[:m, n : n + m] = np.eye(m)
    tab[:m, -1] = rng.uniform(0.1, 1, m)
    tab[m, :n] = rng.uniform(-1, 1, n)
    basis = np.arange(n, n + m, dtype=np.int64)
    return tab, basis


def main():
    if not _kernels.HAVE_NUMBA:
        print("numba unavailable; nothing to compare")
        return
    _kernels.warmup()
    # compile the numba side on small inputs is done by warmup(); the large
    # signatures match, so no recompilation distorts the timings below
    rows = []
    cases = [
        ("simulate_path (2e5 steps)", "simulate_path", workload_simulate(), None),
        ("eval_many (2e5 points)", "eval_many", workload_eval_many(), None),
        ("fold_tuple_values (4096 cells)", "fold_tuple_values", workload_fold(), None),
    ]
    for label, name, args, _ in cases:
        t_np = timeit(_kernels.IMPLS["numpy"][name], *args)
        t_nb = timeit(_kernels.IMPLS["numba"][name], *args)
        rows.append((label, t_np, t_nb))

    # the pivot loop mutates its tableau, so give each run a fresh copy
    tab, basis = workload_lp()
    t_np = timeit(lambda: _kernels.IMPLS["numpy"]["lp_pivot_loop"](
        tab.copy(), basis.copy(), 1e-9, 10_000))
    t_nb = timeit(lambda: _kernels.IMPLS["numba"]["lp_pivot_loop"](
        tab.copy(), basis.copy(), 1e-9, 10_000))
    rows.append(("lp_pivot_loop (400x900)", t_np, t_nb))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for label, t_np, t_nb in rows:
        print(f"{label:<{width}}  {t_np:>9.4f}s  {t_nb:>9.4f}s  {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
