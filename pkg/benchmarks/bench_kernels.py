"""Benchmark the numba kernels against their pure-numpy twins.

Usage:
    python benchmarks/bench_kernels.py [--repeats N]

Covers the hot paths: walk-kernel applications, single-source and all-pairs
BFS, girth, and the tree radial DP (linear and log space). Numba timings
exclude the first (compilation) call.
"""

import argparse
import time

import numpy as np

from ramlab import _kernels, builders, graph_core


def timeit(fn, repeats):
    fn()  # warm up / compile
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    impls = _kernels.implementations()
    if "numba" not in impls:
        raise SystemExit("numba unavailable; nothing to compare")

    graph = builders.build_lps(builders.LpsParams(5, 17))  # n=4896, d=6
    es = graph_core.validate_and_index(graph)
    rng = np.random.default_rng(0)
    vvec = rng.random(graph.n)
    vvec /= vvec.sum()
    evec = rng.random(es.N)
    evec /= evec.sum()
    lrow = np.full(2001, -np.inf)
    lrow[0] = 0.0
    row = np.zeros(2001)
    row[0] = 1.0

    cases = {
        "srw_step (n=4896, d=6)":
            lambda k: k["srw_step"](graph.indices, graph.d, vvec),
        "nbrw_step (N=29376)":
            lambda k: k["nbrw_step"](es.head, es.rev, graph.d, evec),
        "b_apply (N=29376)":
            lambda k: k["b_apply"](es.head, es.rev, graph.d, evec),
        "bfs_distances (n=4896)":
            lambda k: k["bfs_distances"](graph.indices, graph.d, 0),
        "eccentricities (n=4896)":
            lambda k: k["eccentricities"](graph.indices, graph.d),
        "girth (n=4896)":
            lambda k: k["girth"](graph.indices, graph.d),
        "tree_step x200 (len 2001)":
            lambda k: _iterate(k["tree_step"], row, 200),
        "tree_log_step x200 (len 2001)":
            lambda k: _iterate(k["tree_log_step"], lrow, 200),
    }

    print(f"{'kernel':34} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, runner in cases.items():
        t_np = timeit(lambda: runner(impls["numpy"]), args.repeats)
        t_nb = timeit(lambda: runner(impls["numba"]), args.repeats)
        print(f"{name:34} {t_np * 1e3:>10.2f}ms {t_nb * 1e3:>10.2f}ms "
              f"{t_np / t_nb:>8.1f}x")


def _iterate(step, start, times):
    cur = start
    for _ in range(times):
        cur = step(cur, 6)
    return cur


if __name__ == "__main__":
    main()
