import itertools
import math
import random

import pytest

from conftest import random_dag, random_instance
from solverstress import problems
from solverstress.core import (
    AttackAction,
    Color,
    Op,
    Sense,
    apply_action,
    atsp_instance,
    coverage_instance,
    dag_instance,
)
from solverstress.problems import FeasibilityError, SizeGuardError

ATOL = 1e-9

THREE_CITY = [[0, 1, 9], [9, 0, 1], [1, 9, 0]]


# ---------------------------------------------------------------------------
# DAG simulation


def test_dag_simulate_empty():
    assert problems.dag_simulate(dag_instance([], []), []).makespan == 0.0


def test_dag_chain_makespan_forced_by_precedence():
    inst = dag_instance([(1, 0.2), (2, 0.2), (3, 0.2)], [(0, 1), (1, 2)])
    for prio in itertools.permutations(range(3)):
        assert problems.dag_cost(inst, list(prio)) == 6.0


def test_dag_two_parallel_jobs_overlap():
    # hand simulation: both fit (0.5 + 0.5 <= 1), so both start at t=0
    inst = dag_instance([(2, 0.5), (3, 0.5)], [])
    for prio in ([0, 1], [1, 0]):
        sched = problems.dag_simulate(inst, prio)
        assert sched.starts == (0.0, 0.0)
        assert sched.makespan == 3.0


def test_dag_resource_blocking_serializes_jobs():
    # 0.7 + 0.7 > 1: second job must wait for the first to finish
    inst = dag_instance([(2, 0.7), (3, 0.7)], [])
    sched = problems.dag_simulate(inst, [0, 1])
    assert sched.starts == (0.0, 2.0)
    assert sched.makespan == 5.0
    # reversed priority starts job 1 first
    sched = problems.dag_simulate(inst, [1, 0])
    assert sched.starts == (3.0, 0.0)
    assert sched.makespan == 5.0


def test_dag_priority_scan_skips_jobs_that_do_not_fit():
    # priority job 1 (r=0.8) does not fit beside job 0 (r=0.5); job 2 does
    inst = dag_instance([(4, 0.5), (2, 0.8), (2, 0.4)], [])
    sched = problems.dag_simulate(inst, [0, 1, 2])
    assert sched.starts[0] == 0.0
    assert sched.starts[2] == 0.0  # jumped the queue
    assert sched.starts[1] == 4.0  # waits for job 0
    assert sched.makespan == 6.0


def test_dag_single_job_cost():
    assert problems.dag_cost(dag_instance([(3, 0.4)], []), [0]) == 3.0


@pytest.mark.parametrize("seed", range(40))
def test_dag_simulate_invariants_fuzz(seed):
    rng = random.Random(seed)
    inst = random_dag(rng, max_jobs=12)
    prio = list(range(inst.graph.node_count))
    rng.shuffle(prio)
    sched = problems.dag_simulate(inst, prio)
    problems.validate_schedule(inst, sched)


def test_dag_cost_rejects_non_permutation():
    inst = dag_instance([(1, 0.5), (1, 0.5)], [])
    with pytest.raises(FeasibilityError):
        problems.dag_cost(inst, [0, 0])


# ---------------------------------------------------------------------------
# ATSP cost


def test_atsp_single_city_cost_zero():
    assert problems.atsp_cost(atsp_instance([[0]]), [0]) == 0.0


def test_atsp_three_city_tours_enumerated():
    inst = atsp_instance(THREE_CITY)
    # independent oracle: enumerate both tours by hand
    assert problems.atsp_cost(inst, [0, 1, 2]) == 1 + 1 + 1
    assert problems.atsp_cost(inst, [0, 2, 1]) == 9 + 9 + 9


def test_atsp_uniform_matrix_cost():
    w, n = 7.0, 5
    inst = atsp_instance([[0 if i == j else w for j in range(n)] for i in range(n)])
    tour = [0, 2, 4, 1, 3]
    assert problems.atsp_cost(inst, tour) == n * w


def test_atsp_two_cities():
    inst = atsp_instance([[0, 3], [5, 0]])
    assert problems.atsp_cost(inst, [0, 1]) == 8.0


# ---------------------------------------------------------------------------
# Coverage costs


def test_mc_cost_empty_selection():
    inst = coverage_instance([[0, 1], [1, 2]], [1, 1, 1], k_sets=2)
    assert problems.mc_cost(inst, []) == 0.0


def test_mc_cost_union_counts_once():
    inst = coverage_instance([[0, 1], [1, 2]], [1, 1, 1], k_sets=2)
    assert problems.mc_cost(inst, [0, 1]) == 3.0


def test_mc_cost_budget_violation():
    inst = coverage_instance([[0], [1], [2]], [1, 1, 1], k_sets=2)
    with pytest.raises(FeasibilityError, match="budget"):
        problems.mc_cost(inst, [0, 1, 2])


def test_mcscc_cost_and_white_cap():
    inst = coverage_instance(
        [[0, 1, 2, 3]], [0.5, 0.25, 0.0, 0.0],
        colors=[Color.BLACK, Color.BLACK, Color.WHITE, Color.WHITE],
        k_white=2)
    assert problems.mcscc_cost(inst, [0]) == 0.75
    tight = coverage_instance(
        [[0, 1, 2, 3]], [0.5, 0.25, 0.0, 0.0],
        colors=[Color.BLACK, Color.BLACK, Color.WHITE, Color.WHITE],
        k_white=1)
    with pytest.raises(FeasibilityError, match="white"):
        problems.mcscc_cost(tight, [0])
    assert problems.mcscc_cost(tight, []) == 0.0


@pytest.mark.parametrize("problem", ["dag", "atsp", "mc", "mcscc"])
def test_cost_is_bit_deterministic(problem):
    inst = random_instance(problem, 11)
    sol = problems.brute_force_optimum(inst)
    costs = {problems.cost(inst, sol.payload) for _ in range(5)}
    assert len(costs) == 1


# ---------------------------------------------------------------------------
# Candidates


def test_atsp_candidates_exclude_tour_edges():
    inst = atsp_instance(THREE_CITY)
    sol = problems.evaluate(inst, [0, 1, 2])
    cands = problems.candidates(inst, sol)
    assert len(cands) == 3
    pairs = {(a.a1, a.a2) for a in cands}
    assert pairs == {(0, 2), (1, 0), (2, 1)}  # complements of tour edges
    assert all(a.op is Op.HALVE_EDGE for a in cands)


def test_dag_candidates_are_all_edges():
    inst = dag_instance([(1, 0.5)] * 4, [(0, 1), (0, 2), (2, 3)])
    sol = problems.evaluate(inst, [0, 1, 2, 3])
    cands = problems.candidates(inst, sol)
    assert [(a.a1, a.a2) for a in cands] == [(0, 1), (0, 2), (2, 3)]


def test_mc_candidates_only_unchosen_sets_absent_pairs():
    inst = coverage_instance([[0], [1]], [1, 1], k_sets=1)
    sol = problems.evaluate(inst, [0])
    cands = problems.candidates(inst, sol)
    # set 1 is unchosen; element node ids are 2 and 3; (1,3) exists already
    assert [(a.a1, a.a2) for a in cands] == [(1, 2)]


def test_mc_candidates_empty_when_all_sets_chosen():
    inst = coverage_instance([[0], [1]], [1, 1], k_sets=2)
    sol = problems.evaluate(inst, [0, 1])
    assert len(problems.candidates(inst, sol)) == 0


def test_mcscc_candidates_target_blacks_only():
    inst = coverage_instance([[], []], [1.0, 0.0],
                             colors=[Color.BLACK, Color.WHITE], k_white=5)
    sol = problems.evaluate(inst, [])
    cands = problems.candidates(inst, sol)
    assert [(a.a1, a.a2) for a in cands] == [(0, 2), (1, 2)]


@pytest.mark.parametrize("problem", ["dag", "atsp", "mc", "mcscc"])
@pytest.mark.parametrize("seed", range(15))
def test_candidates_lazy_sequence_consistent(problem, seed):
    inst = random_instance(problem, seed)
    sol = problems.brute_force_optimum(inst)
    cands = problems.candidates(inst, sol)
    listed = list(cands)
    assert len(listed) == len(cands)
    assert listed == sorted(set(listed))  # lex order, duplicate-free
    for i, a in enumerate(listed):
        assert cands[i] == a
        # every candidate applies cleanly
        apply_action(inst, a)


# ---------------------------------------------------------------------------
# Brute-force optima


def test_brute_force_three_city():
    sol = problems.brute_force_optimum(atsp_instance(THREE_CITY))
    assert sol.payload == (0, 1, 2)
    assert sol.cost == 3.0


def test_brute_force_mc_enumeration():
    inst = coverage_instance([[0, 1], [1, 2], [2]], [1, 1, 1], k_sets=2)
    # oracle by hand: {S0,S1} -> 3, {S0,S2} -> 3, {S1,S2} -> 2
    sol = problems.brute_force_optimum(inst)
    assert sol.cost == 3.0


def test_brute_force_chain_dag():
    inst = dag_instance([(1, 0.3), (2, 0.3), (3, 0.3)], [(0, 1), (1, 2)])
    assert problems.brute_force_optimum(inst).cost == 6.0


def test_brute_force_size_guard():
    inst = atsp_instance([[0 if i == j else 1 for j in range(10)] for i in range(10)])
    with pytest.raises(SizeGuardError):
        problems.brute_force_optimum(inst)


@pytest.mark.parametrize("seed", range(15))
def test_dag_oracle_serial_family(seed):
    """All resources > 0.5: no two jobs overlap, so opt = sum of durations."""
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    jobs = [(rng.uniform(1, 10), rng.uniform(0.51, 1.0)) for _ in range(n)]
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < 0.3]
    inst = dag_instance(jobs, edges)
    opt = problems.brute_force_optimum(inst)
    assert abs(opt.cost - sum(d for d, _ in jobs)) < ATOL


@pytest.mark.parametrize("seed", range(15))
def test_dag_oracle_parallel_family(seed):
    """Total resource <= 1: everything can overlap, so opt = critical path."""
    rng = random.Random(seed)
    n = rng.randint(1, 7)
    jobs = [(rng.uniform(1, 10), 0.99 / n) for _ in range(n)]
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < 0.4]
    inst = dag_instance(jobs, edges)
    cp = problems._dag_forward_cp(inst)
    opt = problems.brute_force_optimum(inst)
    assert abs(opt.cost - max(cp)) < ATOL


@pytest.mark.parametrize("seed", range(20))
def test_dag_oracle_bounded_by_list_schedules(seed):
    """opt <= every priority-list schedule, and >= both classic lower bounds."""
    rng = random.Random(seed)
    inst = random_dag(rng, max_jobs=5)
    n = inst.graph.node_count
    opt = problems.brute_force_optimum(inst).cost
    best_list = min(problems.dag_cost(inst, list(p))
                    for p in itertools.permutations(range(n)))
    assert opt <= best_list + ATOL
    cp = max(problems._dag_forward_cp(inst), default=0.0)
    area = sum(a.duration * a.resource for a in inst.graph.nodes)
    assert opt >= cp - ATOL
    assert opt >= area - ATOL


def test_dag_oracle_beats_every_list_schedule_when_idling_helps():
    """Non-delay list schedules are provably suboptimal here.

    Chain 1 -> 2 -> 3 plus 1 -> 3; job 2 needs the whole resource. Any list
    schedule co-starts jobs 0 and 1 at t=0 (both ready, both fit), so job 2
    waits for job 0: makespan 15. Idling job 0 until t=7 gives
    1 (0..1), 2 (1..7), then 3 and 0 in parallel: makespan 12.
    """
    inst = dag_instance([(5, 0.6), (1, 0.3), (6, 1.0), (4, 0.3)],
                        [(1, 2), (1, 3), (2, 3)])
    best_list = min(problems.dag_cost(inst, list(p))
                    for p in itertools.permutations(range(4)))
    opt = problems.brute_force_optimum(inst).cost
    assert best_list == 15.0
    assert opt == 12.0


@pytest.mark.parametrize("problem", ["mc", "mcscc"])
@pytest.mark.parametrize("seed", range(10))
def test_coverage_oracle_matches_independent_enumeration(problem, seed):
    inst = random_instance(problem, seed)
    g = inst.graph
    m = g.set_count
    members = [frozenset(v for u, v, _ in g.edges if u == s) for s in range(m)]

    def value(sel):
        covered = set().union(*[members[s] for s in sel]) if sel else set()
        whites = sum(1 for v in covered if g.nodes[v].color is Color.WHITE)
        black = sum(g.nodes[v].weight for v in covered
                    if g.nodes[v].color is Color.BLACK)
        return black, whites

    best = 0.0
    for r in range(m + 1):
        for sel in itertools.combinations(range(m), r):
            black, whites = value(sel)
            if problem == "mc" and len(sel) > inst.k_sets:
                continue
            if problem == "mcscc" and whites > inst.k_white:
                continue
            best = max(best, black)
    assert abs(problems.brute_force_optimum(inst).cost - best) < ATOL


# ---------------------------------------------------------------------------
# No-worse-optimum property (the framework's central guarantee)


@pytest.mark.parametrize("problem", ["dag", "atsp", "mc", "mcscc"])
@pytest.mark.parametrize("seed", range(15))
def test_no_worse_optimum_under_valid_actions(problem, seed):
    inst = random_instance(problem, seed)
    rng = random.Random(seed * 31 + 7)
    opt = problems.brute_force_optimum(inst).cost
    for _ in range(3):
        actions = problems.all_valid_actions(inst)
        if len(actions) == 0:
            break
        inst = apply_action(inst, actions[rng.randrange(len(actions))])
        new_opt = problems.brute_force_optimum(inst).cost
        if inst.sense is Sense.MIN:
            assert new_opt <= opt + ATOL
        else:
            assert new_opt >= opt - ATOL
        opt = new_opt


@pytest.mark.parametrize("seed", range(10))
def test_dag_optimal_schedule_survives_edge_removal(seed):
    """Loosening constraints: the clean optimal schedule stays feasible and
    its makespan is unchanged on the attacked instance."""
    rng = random.Random(seed)
    inst = random_dag(rng, max_jobs=6)
    if not inst.graph.edges:
        return
    sched = problems.dag_brute_force_schedule(inst)
    a = problems.all_valid_actions(inst)[rng.randrange(len(inst.graph.edges))]
    attacked = apply_action(inst, a)
    problems.validate_schedule(attacked, sched)


@pytest.mark.parametrize("seed", range(10))
def test_atsp_clean_optimal_tour_never_worse_after_halving(seed):
    inst = random_instance("atsp", seed)
    opt = problems.brute_force_optimum(inst)
    actions = problems.all_valid_actions(inst)
    rng = random.Random(seed)
    attacked = apply_action(inst, actions[rng.randrange(len(actions))])
    assert problems.atsp_cost(attacked, opt.payload) <= opt.cost + ATOL


@pytest.mark.parametrize("problem", ["mc", "mcscc"])
@pytest.mark.parametrize("seed", range(10))
def test_coverage_clean_optimum_keeps_weight_after_addition(problem, seed):
    inst = random_instance(problem, seed)
    opt = problems.brute_force_optimum(inst)
    actions = problems.all_valid_actions(inst)
    if len(actions) == 0:
        return
    rng = random.Random(seed)
    attacked = apply_action(inst, actions[rng.randrange(len(actions))])
    assert problems.cost(attacked, opt.payload) >= opt.cost - ATOL
