"""Built-in heuristic solvers; pure functions of the instance."""

from __future__ import annotations

import numpy as np

from .. import problems
from ..core import ProblemInstance, Solution
from .._kernels import (
    atsp_furthest_insertion as _fi_kernel,
    atsp_nearest_neighbour as _nn_kernel,
    mc_greedy as _mc_greedy_kernel,
    mcscc_greedy_average as _ga_kernel,
    mcscc_local as _local_kernel,
)


def dag_sjf(inst: ProblemInstance) -> Solution:
    """Shortest-job-first: ascending duration, ties by job id."""
    g = inst.graph
    prio = sorted(range(g.node_count), key=lambda v: (g.nodes[v].duration, v))
    return problems.evaluate(inst, prio)


def dag_critical_path(inst: ProblemInstance) -> Solution:
    """Descending forward critical-path length, ties by job id."""
    cp = problems._dag_forward_cp(inst)
    prio = sorted(range(inst.graph.node_count), key=lambda v: (-cp[v], v))
    return problems.evaluate(inst, prio)


def dag_tetris(inst: ProblemInstance) -> Solution:
    """Descending duration x resource block area, ties by job id."""
    g = inst.graph
    prio = sorted(
        range(g.node_count),
        key=lambda v: (-(g.nodes[v].duration * g.nodes[v].resource), v),
    )
    return problems.evaluate(inst, prio)


def atsp_nearest_neighbour(inst: ProblemInstance) -> Solution:
    """From city 0, repeatedly visit the nearest unvisited city (ties: low id)."""
    tour = _nn_kernel(problems._atsp_matrix(inst))
    return problems.evaluate(inst, [int(x) for x in tour])


def atsp_furthest_insertion(inst: ProblemInstance) -> Solution:
    """Insert the city furthest from the tour at its cheapest position."""
    tour = _fi_kernel(problems._atsp_matrix(inst))
    return problems.evaluate(inst, [int(x) for x in tour])


def mc_greedy(inst: ProblemInstance) -> Solution:
    """Repeatedly take the set covering the most uncovered weight."""
    indptr, members, weights, _, _ = problems._coverage_views(inst)
    n_el = inst.graph.node_count - inst.graph.set_count
    picks = _mc_greedy_kernel(indptr, members, weights, n_el, inst.k_sets)
    return problems.evaluate(inst, sorted(int(s) for s in picks))


def mcscc_local(inst: ProblemInstance) -> Solution:
    """Scan sets in id order; add whenever the white budget allows."""
    indptr, members, _, is_white, _ = problems._coverage_views(inst)
    picks = _local_kernel(indptr, members, is_white, inst.k_white)
    return problems.evaluate(inst, sorted(int(s) for s in picks))


def mcscc_greedy_average(inst: ProblemInstance) -> Solution:
    """Most cost-effective set first (black gain per newly covered white)."""
    indptr, members, weights, is_white, _ = problems._coverage_views(inst)
    picks = _ga_kernel(indptr, members, weights, is_white, inst.k_white)
    return problems.evaluate(inst, sorted(int(s) for s in picks))


BUILTIN_SOLVERS = {
    "dag_sjf": ("dag", dag_sjf),
    "dag_critical_path": ("dag", dag_critical_path),
    "dag_tetris": ("dag", dag_tetris),
    "atsp_nearest_neighbour": ("atsp", atsp_nearest_neighbour),
    "atsp_furthest_insertion": ("atsp", atsp_furthest_insertion),
    "mc_greedy": ("mc", mc_greedy),
    "mcscc_local": ("mcscc", mcscc_local),
    "mcscc_greedy_average": ("mcscc", mcscc_greedy_average),
}
