"""Bit-exact parity between the compiled kernels and the pure fallback."""

import os
import random

import numpy as np
import pytest

from solverstress._kernels import BACKEND, fallback

try:
    from solverstress._kernels import _speedups
except ImportError:  # pure-only environment
    _speedups = None

pytestmark = pytest.mark.skipif(_speedups is None,
                                reason="compiled kernels not built")


def test_compiled_backend_is_active_by_default():
    if os.environ.get("SOLVERSTRESS_PURE", "") not in ("", "0"):
        pytest.skip("pure backend forced via SOLVERSTRESS_PURE")
    assert BACKEND == "compiled"


def _random_dag_arrays(rng, n):
    durations = np.array([rng.uniform(0.5, 20.0) for _ in range(n)])
    resources = np.array([rng.uniform(0.05, 1.0) for _ in range(n)])
    succ = [[] for _ in range(n)]
    n_parents = np.zeros(n, dtype=np.int64)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < 0.3:
                succ[u].append(v)
                n_parents[v] += 1
    indptr = np.zeros(n + 1, dtype=np.int64)
    flat = []
    for u in range(n):
        flat.extend(succ[u])
        indptr[u + 1] = len(flat)
    prio = list(range(n))
    rng.shuffle(prio)
    return (durations, resources, n_parents, indptr,
            np.array(flat, dtype=np.int64), np.array(prio, dtype=np.int64))


@pytest.mark.parametrize("seed", range(30))
def test_dag_schedule_parity(seed):
    rng = random.Random(seed)
    args = _random_dag_arrays(rng, rng.randint(1, 30))
    s1, f1 = _speedups.dag_schedule(*args)
    s2, f2 = fallback.dag_schedule(*args)
    assert s1.tolist() == s2.tolist()
    assert f1.tolist() == f2.tolist()


@pytest.mark.parametrize("seed", range(30))
def test_atsp_kernels_parity(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 15)
    d = np.array([[0.0 if i == j else rng.uniform(0.5, 100.0)
                   for j in range(n)] for i in range(n)])
    nn1 = _speedups.atsp_nearest_neighbour(d)
    nn2 = fallback.atsp_nearest_neighbour(d)
    assert nn1.tolist() == nn2.tolist()
    fi1 = _speedups.atsp_furthest_insertion(d)
    fi2 = fallback.atsp_furthest_insertion(d)
    assert fi1.tolist() == fi2.tolist()
    tour = np.array(list(range(n)), dtype=np.int64)
    assert _speedups.atsp_tour_cost(d, tour) == fallback.atsp_tour_cost(d, tour)


@pytest.mark.parametrize("seed", range(10))
def test_atsp_brute_force_parity(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 7)
    d = np.array([[0.0 if i == j else float(rng.randint(1, 40))
                   for j in range(n)] for i in range(n)])
    t1, c1 = _speedups.atsp_brute_force(d)
    t2, c2 = fallback.atsp_brute_force(d)
    assert t1.tolist() == t2.tolist()
    assert c1 == c2


def _random_cov_arrays(rng, m, n_el, whites=False):
    per_set = [[e for e in range(n_el) if rng.random() < 0.4] for _ in range(m)]
    indptr = np.zeros(m + 1, dtype=np.int64)
    flat = []
    for s in range(m):
        flat.extend(per_set[s])
        indptr[s + 1] = len(flat)
    weights = np.array([rng.uniform(0, 5) for _ in range(n_el)])
    is_white = np.array(
        [1 if whites and rng.random() < 0.5 else 0 for e in range(n_el)],
        dtype=np.uint8)
    return indptr, np.array(flat, dtype=np.int64), weights, is_white


@pytest.mark.parametrize("seed", range(30))
def test_coverage_kernels_parity(seed):
    rng = random.Random(seed)
    m, n_el = rng.randint(1, 10), rng.randint(1, 20)
    indptr, members, weights, is_white = _random_cov_arrays(rng, m, n_el, whites=True)
    sel = np.array(sorted(rng.sample(range(m), rng.randint(0, m))), dtype=np.int64)
    assert (_speedups.coverage_stats(indptr, members, weights, is_white, sel)
            == fallback.coverage_stats(indptr, members, weights, is_white, sel))
    k = rng.randint(1, m)
    g1 = _speedups.mc_greedy(indptr, members, weights, n_el, k)
    g2 = fallback.mc_greedy(indptr, members, weights, n_el, k)
    assert g1.tolist() == g2.tolist()
    kw = rng.randint(0, n_el)
    l1 = _speedups.mcscc_local(indptr, members, is_white, kw)
    l2 = fallback.mcscc_local(indptr, members, is_white, kw)
    assert l1.tolist() == l2.tolist()
    a1 = _speedups.mcscc_greedy_average(indptr, members, weights, is_white, kw)
    a2 = fallback.mcscc_greedy_average(indptr, members, weights, is_white, kw)
    assert a1.tolist() == a2.tolist()
