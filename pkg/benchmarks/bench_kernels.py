#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Per-kernel microbenchmarks run both backends in-process on identical inputs
(and assert the outputs match bit-exactly); the end-to-end attack benchmark
re-launches the interpreter with SOLVERSTRESS_PURE=1 to exercise the
import-time backend switch.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--skip-e2e]
"""

import argparse
import os
import random
import subprocess
import sys
import time

import numpy as np

from solverstress._kernels import fallback

try:
    from solverstress._kernels import _speedups
except ImportError:
    print("compiled kernels not built; run `pip install -e . --no-build-isolation`")
    sys.exit(1)


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _dag_workload(rng, n=150):
    durations = np.array([rng.uniform(1, 100) for _ in range(n)])
    resources = np.array([rng.uniform(0.05, 0.6) for _ in range(n)])
    succ = [[] for _ in range(n)]
    n_parents = np.zeros(n, dtype=np.int64)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < 0.05:
                succ[u].append(v)
                n_parents[v] += 1
    indptr = np.zeros(n + 1, dtype=np.int64)
    flat = []
    for u in range(n):
        flat.extend(succ[u])
        indptr[u + 1] = len(flat)
    prio = np.array(rng.sample(range(n), n), dtype=np.int64)
    return (durations, resources, n_parents, indptr,
            np.array(flat, dtype=np.int64), prio)


def _atsp_matrix(rng, n=100):
    d = np.array([[0.0 if i == j else float(rng.randint(1, 10 ** 6))
                   for j in range(n)] for i in range(n)])
    return fallback.tmat_close(d)


def _coverage_workload(rng, m=200, n_el=400):
    per_set = [[e for e in range(n_el) if rng.random() < 2.0 / m]
               for _ in range(m)]
    indptr = np.zeros(m + 1, dtype=np.int64)
    flat = []
    for s in range(m):
        flat.extend(per_set[s])
        indptr[s + 1] = len(flat)
    weights = np.array([float(rng.randint(1, 100)) for _ in range(n_el)])
    is_white = np.zeros(n_el, dtype=np.uint8)
    return indptr, np.array(flat, dtype=np.int64), weights, is_white


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--skip-e2e", action="store_true")
    args = parser.parse_args()

    rng = random.Random(0)
    dag = _dag_workload(rng)
    dist = _atsp_matrix(rng)
    ip, mem, w, iw = _coverage_workload(rng)
    tour = np.arange(dist.shape[0], dtype=np.int64)
    dist8 = _atsp_matrix(rng, n=8)

    cases = [
        ("dag_schedule (150 jobs)",
         lambda M: M.dag_schedule(*dag)),
        ("atsp_nearest_neighbour (100 cities)",
         lambda M: M.atsp_nearest_neighbour(dist)),
        ("atsp_furthest_insertion (100 cities)",
         lambda M: M.atsp_furthest_insertion(dist)),
        ("atsp_tour_cost (100 cities)",
         lambda M: M.atsp_tour_cost(dist, tour)),
        ("atsp_brute_force (8 cities)",
         lambda M: M.atsp_brute_force(dist8)),
        ("mc_greedy (200x400, k=20)",
         lambda M: M.mc_greedy(ip, mem, w, 400, 20)),
        ("coverage_stats (200 sets)",
         lambda M: M.coverage_stats(ip, mem, w, iw,
                                    np.arange(0, 200, 2, dtype=np.int64))),
        ("mcscc_greedy_average (200x400)",
         lambda M: M.mcscc_greedy_average(ip, mem, w, iw, 10 ** 9)),
    ]

    print(f"{'kernel':40s} {'pure':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, fn in cases:
        t_pure, out_pure = timeit(lambda: fn(fallback), args.repeat)
        t_fast, out_fast = timeit(lambda: fn(_speedups), args.repeat)
        same = _same(out_pure, out_fast)
        flag = "" if same else "  [MISMATCH]"
        print(f"{name:40s} {t_pure * 1e3:9.3f}ms {t_fast * 1e3:9.3f}ms "
              f"{t_pure / t_fast:7.1f}x{flag}")

    if not args.skip_e2e:
        # the interesting end-to-end case is a dag dataset: each solver call
        # simulates a 100-job schedule, so the kernel dominates the attack loop
        print("\nend-to-end: ra attack (N=8, K=20), dag-100 x 3 vs tetris",
              flush=True)
        script = (
            "import time,random;"
            "from solverstress.harness import datasets;"
            "from solverstress import attackers, solvers;"
            "from solverstress._kernels import BACKEND;"
            "insts=[datasets.gen_dag(random.Random(i),datasets._PARAM_DEFAULTS['dag']|{'jobs':100}) for i in range(3)];"
            "h=solvers.builtin_handle('dag_tetris');"
            "t0=time.perf_counter();"
            "[attackers.attack_ra(h,i,attackers.AttackConfig(budget=20,trials=8,seed=0)) for i in insts];"
            "print(f'  {BACKEND}: {time.perf_counter()-t0:.2f}s')"
        )
        for pure in ("0", "1"):
            env = dict(os.environ, SOLVERSTRESS_PURE=pure)
            subprocess.run([sys.executable, "-c", script], env=env, check=True)


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return a.tolist() == b.tolist()
    return a == b


if __name__ == "__main__":
    main()
