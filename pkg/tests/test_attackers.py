import math
import random

import pytest

from conftest import random_instance
from solverstress import attackers, problems, solvers
from solverstress.attackers import (
    AttackConfig,
    SAParams,
    attack_beam,
    attack_og,
    attack_ra,
    attack_random_baseline,
    attack_sa,
    default_config,
    degradation,
    sa_acceptance,
    uniform_random_policy,
)
from solverstress.core import Sense, Solution, apply_action, atsp_instance, coverage_instance

NN = solvers.builtin_handle("atsp_nearest_neighbour")
GREEDY = solvers.builtin_handle("mc_greedy")


# ---------------------------------------------------------------------------
# Degradation + acceptance law


def test_degradation_sign_convention():
    assert degradation(Sense.MIN, 10.0, 12.0) == 2.0
    assert degradation(Sense.MAX, 3.0, 2.0) == 1.0
    assert degradation(Sense.MIN, 5.0, 5.0) == 0.0


def test_sa_acceptance_improving_moves_always_pass():
    assert sa_acceptance(0.5, 1.0, 0.0, 1.0) == 1.0
    assert sa_acceptance(0.0, 1.0, 0.0, 1.0) == 1.0
    assert sa_acceptance(-1.0, 1.0, 1.5, 1.0) == 1.0  # bias covers the loss


def test_sa_acceptance_worse_move_probability():
    p = sa_acceptance(-1.0, 1.0, 0.0, 1.0)
    assert abs(p - math.exp(-1)) < 1e-12


def test_sa_acceptance_monotone_in_temperature():
    # fixed worse move gets less likely as the temperature decays by half
    t, last = 1.0, 1.0
    for _ in range(6):
        p = sa_acceptance(-1.0, 1.0, 0.0, t)
        assert p <= last + 1e-15
        last = p
        t *= 0.5


def test_sa_acceptance_empirical_frequency():
    rng = random.Random(123)
    hits = sum(1 for _ in range(10_000)
               if rng.random() <= sa_acceptance(-1.0, 1.0, 0.0, 1.0))
    assert abs(hits / 10_000 - math.exp(-1)) < 0.02


# ---------------------------------------------------------------------------
# Shared attacker properties


def _cfg(**kw):
    kw.setdefault("budget", 3)
    kw.setdefault("seed", 42)
    return AttackConfig(**kw)


@pytest.mark.parametrize("name", ["ra", "og", "sa", "beam"])
@pytest.mark.parametrize("problem,solver", [("atsp", NN), ("mc", GREEDY)])
def test_search_attackers_nonnegative_gain_and_budget(name, problem, solver, subtests=None):
    inst = random_instance(problem, 9)
    cfg = _cfg(trials=3, beam=2, samples=3)
    res = attackers.run_attack(name, solver, inst, cfg)
    assert res.gain >= 0.0
    assert len(res.trace) <= cfg.budget
    assert res.gain == degradation(inst.sense, res.clean_cost, res.best_cost)


@pytest.mark.parametrize("name", ["baseline", "ra", "og", "sa", "beam"])
def test_attackers_deterministic_given_seed(name):
    inst = random_instance("atsp", 5)
    cfg = _cfg(trials=2, beam=2, samples=2, seed=7)
    a = attackers.run_attack(name, NN, inst, cfg)
    b = attackers.run_attack(name, NN, inst, cfg)
    assert a == b
    c = attackers.run_attack(name, NN, inst, _cfg(trials=2, beam=2, samples=2, seed=8))
    assert (a.trace != c.trace) or (a.best_cost == c.best_cost)


@pytest.mark.parametrize("name", ["ra", "og", "sa", "beam"])
def test_best_instance_reachable_via_trace(name):
    inst = random_instance("atsp", 11)
    res = attackers.run_attack(name, NN, inst, _cfg(trials=2, beam=2, samples=3))
    replay = inst
    for action, _ in res.trace:
        replay = apply_action(replay, action)
    assert replay == res.best_instance


# ---------------------------------------------------------------------------
# Random baseline


def test_baseline_zero_budget_zero_gain():
    inst = random_instance("atsp", 1)
    res = attack_random_baseline(NN, inst, _cfg(budget=0))
    assert res.gain == 0.0
    assert res.evaluations == 0
    assert res.best_instance == inst


def test_baseline_single_candidate_is_forced():
    # one unchosen set with one absent element edge -> exactly one candidate
    inst = coverage_instance([[0], [1]], [5.0, 1.0], k_sets=1)
    clean = solvers.solve(GREEDY, inst)
    cands = problems.candidates(inst, clean)
    assert len(cands) == 1
    res = attack_random_baseline(GREEDY, inst, _cfg(budget=1))
    assert res.best_instance == apply_action(inst, cands[0])
    assert res.evaluations == 1


def test_baseline_gain_can_be_negative():
    # random halving usually helps a minimizing solver
    gains = []
    inst = random_instance("atsp", 23)
    for seed in range(12):
        res = attack_random_baseline(NN, inst, _cfg(budget=6, seed=seed))
        gains.append(res.gain)
    assert min(gains) < 0.0


# ---------------------------------------------------------------------------
# RA


def test_ra_single_trial_is_one_rollout():
    inst = random_instance("atsp", 2)
    res = attack_ra(NN, inst, _cfg(trials=1, budget=4))
    assert res.evaluations == 4


def test_ra_call_count_exactly_n_times_k():
    inst = random_instance("atsp", 3)
    cfg = _cfg(trials=5, budget=4)
    res = attack_ra(NN, inst, cfg)
    assert res.evaluations == cfg.trials * cfg.budget


def test_ra_beats_baseline_on_average():
    inst = random_instance("atsp", 17)
    ra_gains, base_gains = [], []
    for seed in range(10):
        ra_gains.append(attack_ra(NN, inst, _cfg(trials=5, budget=5, seed=seed)).gain)
        base_gains.append(
            attack_random_baseline(NN, inst, _cfg(budget=5, seed=seed)).gain)
    assert sum(ra_gains) / 10 >= sum(base_gains) / 10


# ---------------------------------------------------------------------------
# OG


def test_og_b1_m1_is_a_single_walk():
    inst = random_instance("atsp", 4)
    res = attack_og(NN, inst, _cfg(beam=1, samples=1, budget=5))
    assert res.evaluations == 5


def test_og_call_count_formula_and_bound():
    inst = random_instance("atsp", 6)
    cfg = _cfg(beam=2, samples=3, budget=4)
    res = attack_og(NN, inst, cfg)
    # step 1 expands the single root; later steps expand B kept states
    expected = cfg.samples + (cfg.budget - 1) * cfg.beam * cfg.samples
    assert res.evaluations == expected
    assert res.evaluations <= cfg.beam * cfg.samples * cfg.budget


def _exhaustive_best_gain(solver, inst, budget):
    """Independent oracle: DFS over every action sequence of length <= K."""
    clean = solvers.solve(solver, inst)
    best = 0.0

    def rec(cur, ref, depth):
        nonlocal best
        if depth == budget:
            return
        for a in problems.candidates(cur, ref):
            child = apply_action(cur, a)
            sol = solvers.solve(solver, child)
            best = max(best, degradation(inst.sense, clean.cost, sol.cost))
            rec(child, sol if sol.ok else ref, depth + 1)

    rec(inst, clean, 0)
    return best


def test_og_with_huge_beam_is_exhaustive():
    inst = coverage_instance([[0, 1], [2]], [3.0, 1.0, 2.0], k_sets=1)
    oracle = _exhaustive_best_gain(GREEDY, inst, 2)
    res = attack_og(GREEDY, inst, _cfg(beam=64, samples=64, budget=2))
    assert res.gain == oracle


# ---------------------------------------------------------------------------
# SA


def test_sa_all_accepting_bias_walks_k_steps():
    inst = random_instance("atsp", 8)
    cfg = _cfg(trials=3, samples=4, budget=5, sa=SAParams(eps=1e6))
    res = attack_sa(NN, inst, cfg)
    assert res.evaluations == cfg.trials * cfg.budget  # one sample per step


def test_sa_never_accepting_stops_after_first_step():
    # a fake minimizing solver whose cost is the total edge weight: every
    # halving strictly improves it, so every move has negative gain
    def shrinking(inst):
        total = sum(w for _, _, w in inst.graph.edges)
        return Solution(payload=tuple(range(inst.graph.node_count)),
                        cost=total, sense=Sense.MIN)

    inst = random_instance("atsp", 8)
    cfg = _cfg(trials=4, samples=3, budget=5, sa=SAParams(beta=1e9))
    res = attack_sa(shrinking, inst, cfg)
    assert res.evaluations == cfg.trials * cfg.samples
    assert res.gain == 0.0


def test_sa_respects_global_bound():
    inst = random_instance("atsp", 12)
    cfg = _cfg(trials=3, samples=4, budget=5)
    res = attack_sa(NN, inst, cfg)
    assert res.evaluations <= cfg.trials * cfg.samples * cfg.budget


# ---------------------------------------------------------------------------
# Beam attack


def test_beam_k1_full_width_takes_best_single_action():
    inst = random_instance("atsp", 13)
    clean = solvers.solve(NN, inst)
    cands = problems.candidates(inst, clean)
    best = max(
        (degradation(inst.sense, clean.cost,
                     solvers.solve(NN, apply_action(inst, a)).cost) for a in cands),
        default=0.0)
    cfg = _cfg(beam=len(cands), budget=1)
    res = attack_beam(uniform_random_policy(0), NN, inst, cfg)
    assert res.gain == max(best, 0.0)


def test_beam_with_oracle_policy_matches_exhaustive():
    inst = coverage_instance([[0, 1], [2]], [3.0, 1.0, 2.0], k_sets=1)
    oracle = _exhaustive_best_gain(GREEDY, inst, 2)

    def oracle_policy(cur, ref, cands):
        clean = solvers.solve(GREEDY, inst)
        scores = []
        for a in cands:
            sol = solvers.solve(GREEDY, apply_action(cur, a))
            scores.append(degradation(inst.sense, clean.cost, sol.cost))
        return scores

    res = attack_beam(oracle_policy, GREEDY, inst, _cfg(beam=64, budget=2))
    assert res.gain == oracle


def test_beam_uniform_policy_statistically_matches_og():
    from scipy import stats

    inst = random_instance("atsp", 29)
    beam_gains, og_gains = [], []
    for seed in range(20):
        cfg = AttackConfig(budget=3, beam=3, samples=3, seed=seed)
        beam_gains.append(
            attack_beam(uniform_random_policy(seed), NN, inst, cfg).gain)
        og_gains.append(attack_og(NN, inst, cfg).gain)
    p = stats.mannwhitneyu(beam_gains, og_gains).pvalue
    assert p > 0.01


# ---------------------------------------------------------------------------
# Defaults and dispatch


def test_default_configs_per_problem():
    assert default_config("dag", "ra").trials == 30
    assert default_config("dag", "ra").budget == 20
    assert default_config("atsp", "og").beam == 5
    assert default_config("atsp", "og").samples == 25
    assert default_config("mc", "sa").trials == 22
    assert default_config("mc", "sa").samples == 10
    assert default_config("mcscc", "ra").trials == 250
    assert default_config("mc", "beam").budget == 10
    assert default_config("atsp", "beam").beam == 5


def test_unknown_attacker_rejected():
    with pytest.raises(KeyError):
        attackers.run_attack("gradient", NN, random_instance("atsp", 0), _cfg())
