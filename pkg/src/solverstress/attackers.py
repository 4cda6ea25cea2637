"""Black-box perturbation search: random baseline, random search, beam-guided
search, simulated annealing, and the policy-driven beam attack.

All attackers are deterministic functions of (solver, instance, config.seed).
Search attackers keep the clean instance as a fallback, so their gain is
always >= 0; the no-search baseline reports the final perturbed instance
as-is and its gain may be negative.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import problems, solvers
from .core import AttackAction, ProblemInstance, Sense, Solution, apply_action


def derive_seed(seed: int, *parts) -> int:
    """Stable 63-bit child seed from a root seed and a label path."""
    h = hashlib.sha256(repr((seed,) + parts).encode("utf-8")).digest()
    return int.from_bytes(h[:8], "big") >> 1


def degradation(sense: Sense, clean: float, attacked: float) -> float:
    """Sign-unified solver-quality loss; an attack succeeds iff it is > 0."""
    return attacked - clean if sense is Sense.MIN else clean - attacked


def sa_acceptance(dgain: float, beta: float, eps: float, temperature: float) -> float:
    """min(1, exp((beta*dgain + eps) / T)) without overflow."""
    x = (beta * dgain + eps) / temperature
    if x >= 0.0:
        return 1.0
    return math.exp(x)


@dataclass(frozen=True)
class SAParams:
    t0: float = 1.0
    decay: float = 0.95
    beta: float = 1.0
    eps: float = 0.0

    def __post_init__(self):
        if not (self.t0 > 0 and 0 < self.decay < 1 and self.beta > 0 and self.eps >= 0):
            raise ValueError("invalid annealing parameters")


@dataclass(frozen=True)
class AttackConfig:
    budget: int                 # K: max number of edge modifications
    trials: int = 1             # N: independent restarts (ra/sa)
    beam: int = 1               # B: states kept per step (og/beam)
    samples: int = 1            # M: sampled actions per state/step (og/sa)
    sa: SAParams = SAParams()
    seed: int = 0

    def __post_init__(self):
        if self.budget < 0 or min(self.trials, self.beam, self.samples) < 1:
            raise ValueError("budget must be >= 0 and trials/beam/samples >= 1")


# Attacker hyperparameter defaults per problem (budget, N, B, M).
_DEFAULTS = {
    "dag": dict(budget=20, ra_n=30, og_b=3, og_m=9, sa_n=5, sa_m=6, beam_b=3),
    "atsp": dict(budget=20, ra_n=130, og_b=5, og_m=25, sa_n=13, sa_m=10, beam_b=5),
    "mc": dict(budget=10, ra_n=220, og_b=6, og_m=36, sa_n=22, sa_m=10, beam_b=6),
    "mcscc": dict(budget=10, ra_n=250, og_b=6, og_m=36, sa_n=25, sa_m=10, beam_b=6),
}


def default_config(problem: str, attacker: str, seed: int = 0,
                   budget: Optional[int] = None) -> AttackConfig:
    d = _DEFAULTS[problem]
    k = d["budget"] if budget is None else budget
    if attacker in ("baseline",):
        return AttackConfig(budget=k, seed=seed)
    if attacker == "ra":
        return AttackConfig(budget=k, trials=d["ra_n"], seed=seed)
    if attacker == "og":
        return AttackConfig(budget=k, beam=d["og_b"], samples=d["og_m"], seed=seed)
    if attacker == "sa":
        return AttackConfig(budget=k, trials=d["sa_n"], samples=d["sa_m"], seed=seed)
    if attacker == "beam":
        return AttackConfig(budget=k, beam=d["beam_b"], seed=seed)
    raise KeyError(f"unknown attacker {attacker!r}")


@dataclass(frozen=True)
class AttackResult:
    best_instance: ProblemInstance
    best_cost: float
    clean_cost: float
    gain: float
    trace: tuple[tuple[AttackAction, Optional[float]], ...]
    evaluations: int  # solver calls on perturbed instances


class _Evaluator:
    """Counts solver calls on perturbed instances; the clean solve is free."""

    def __init__(self, solver):
        self._fn = solver if callable(solver) else (
            lambda inst: solvers.solve(solver, inst))
        self.calls = 0

    def clean(self, inst: ProblemInstance) -> Solution:
        return self._fn(inst)

    def __call__(self, inst: ProblemInstance) -> Solution:
        self.calls += 1
        return self._fn(inst)


@dataclass
class _State:
    inst: ProblemInstance
    ref: Solution  # last feasible solution; narrows the candidate space
    gain: float
    path: tuple[tuple[AttackAction, float], ...] = ()


class _Best:
    """Best-by-gain tracker with the clean instance as the initial fallback."""

    def __init__(self, instance: ProblemInstance, clean: Solution):
        self.inst = instance
        self.cost = clean.cost
        self.gain = 0.0
        self.path: tuple = ()

    def offer(self, state: _State, cost: float) -> None:
        if state.gain > self.gain:
            self.inst = state.inst
            self.cost = cost
            self.gain = state.gain
            self.path = state.path


def _result(best: _Best, clean: Solution, ev: _Evaluator) -> AttackResult:
    return AttackResult(
        best_instance=best.inst,
        best_cost=best.cost,
        clean_cost=clean.cost,
        gain=best.gain,
        trace=tuple(best.path),
        evaluations=ev.calls,
    )


def _ref(prev: Solution, sol: Solution) -> Solution:
    # flagged solutions carry no usable payload for candidate narrowing
    return sol if sol.ok else prev


def attack_random_baseline(solver, instance: ProblemInstance,
                           cfg: AttackConfig) -> AttackResult:
    """Apply K uniformly random candidate actions, then evaluate once.

    No search and no clean-instance fallback: the reported gain is the
    degradation of the final perturbed instance and may be negative.
    """
    ev = _Evaluator(solver)
    clean = ev.clean(instance)
    rng = random.Random(derive_seed(cfg.seed, "baseline"))
    inst = instance
    actions: list[AttackAction] = []
    for _ in range(cfg.budget):
        cands = problems.candidates(inst, clean)
        if len(cands) == 0:
            break
        a = cands[rng.randrange(len(cands))]
        inst = apply_action(inst, a)
        actions.append(a)
    if not actions:
        return AttackResult(instance, clean.cost, clean.cost, 0.0, (), ev.calls)
    final = ev(inst)
    gain = degradation(instance.sense, clean.cost, final.cost)
    trace = tuple((a, None) for a in actions[:-1]) + ((actions[-1], final.cost),)
    return AttackResult(inst, final.cost, clean.cost, gain, trace, ev.calls)


def attack_ra(solver, instance: ProblemInstance, cfg: AttackConfig) -> AttackResult:
    """N independent random K-step rollouts; best over every visited state.

    Exactly N*K solver calls when candidates never run out.
    """
    ev = _Evaluator(solver)
    clean = ev.clean(instance)
    best = _Best(instance, clean)
    sense = instance.sense
    for trial in range(cfg.trials):
        rng = random.Random(derive_seed(cfg.seed, "ra", trial))
        st = _State(instance, clean, 0.0)
        for _ in range(cfg.budget):
            cands = problems.candidates(st.inst, st.ref)
            if len(cands) == 0:
                break
            a = cands[rng.randrange(len(cands))]
            inst = apply_action(st.inst, a)
            sol = ev(inst)
            g = degradation(sense, clean.cost, sol.cost)
            st = _State(inst, _ref(st.ref, sol), g, st.path + ((a, sol.cost),))
            best.offer(st, sol.cost)
    return _result(best, clean, ev)


def attack_og(solver, instance: ProblemInstance, cfg: AttackConfig) -> AttackResult:
    """Beam of B states; per step, each state spawns M random distinct
    actions; the globally best B children survive. At most B*M*K calls."""
    ev = _Evaluator(solver)
    clean = ev.clean(instance)
    best = _Best(instance, clean)
    sense = instance.sense
    rng = random.Random(derive_seed(cfg.seed, "og"))
    states = [_State(instance, clean, 0.0)]
    for _ in range(cfg.budget):
        children = []
        for si, st in enumerate(states):
            cands = problems.candidates(st.inst, st.ref)
            if len(cands) == 0:
                continue
            for idx in rng.sample(range(len(cands)), min(cfg.samples, len(cands))):
                a = cands[idx]
                inst = apply_action(st.inst, a)
                sol = ev(inst)
                g = degradation(sense, clean.cost, sol.cost)
                child = _State(inst, _ref(st.ref, sol), g, st.path + ((a, sol.cost),))
                best.offer(child, sol.cost)
                children.append((-g, a.a1, a.a2, si, child))
        if not children:
            break
        children.sort(key=lambda c: c[:4])
        states = [c[4] for c in children[:cfg.beam]]
    return _result(best, clean, ev)


def attack_sa(solver, instance: ProblemInstance, cfg: AttackConfig) -> AttackResult:
    """Annealed acceptance over sampled actions, restarted N times.

    Per step, up to M candidate actions are drawn (with replacement); the
    first whose acceptance test passes becomes the new state. The step count
    is K, the temperature decays by cfg.sa.decay per step, and a step with
    no accepted action ends the restart. At most N*M*K solver calls.
    """
    ev = _Evaluator(solver)
    clean = ev.clean(instance)
    best = _Best(instance, clean)
    sense = instance.sense
    p = cfg.sa
    for trial in range(cfg.trials):
        rng = random.Random(derive_seed(cfg.seed, "sa", trial))
        st = _State(instance, clean, 0.0)
        temperature = p.t0
        for _ in range(cfg.budget):
            cands = problems.candidates(st.inst, st.ref)
            if len(cands) == 0:
                break
            accepted = False
            for _ in range(cfg.samples):
                a = cands[rng.randrange(len(cands))]
                inst = apply_action(st.inst, a)
                sol = ev(inst)
                g = degradation(sense, clean.cost, sol.cost)
                prob = sa_acceptance(g - st.gain, p.beta, p.eps, temperature)
                if rng.random() <= prob:
                    st = _State(inst, _ref(st.ref, sol), g, st.path + ((a, sol.cost),))
                    best.offer(st, sol.cost)
                    accepted = True
                    break
            if not accepted:
                break
            temperature *= p.decay
    return _result(best, clean, ev)


# ---------------------------------------------------------------------------
# Policy-driven beam attack

Policy = Callable[[ProblemInstance, Solution, Sequence[AttackAction]], Sequence[float]]


class BeamDriver:
    """Incremental beam search over attack actions.

    Callers repeatedly fetch ``pending()`` (the states needing action
    scores), then ``advance(scores)`` with one score list per pending state.
    This powers both the in-process beam attack and the bridge protocol's
    remote evaluation, which supplies scores over the wire.
    """

    def __init__(self, solver, instance: ProblemInstance, cfg: AttackConfig):
        self._ev = _Evaluator(solver)
        self._clean = self._ev.clean(instance)
        self._best = _Best(instance, self._clean)
        self._sense = instance.sense
        self._cfg = cfg
        self._states = [_State(instance, self._clean, 0.0)]
        self._step = 0
        self._pending: list[tuple[_State, Sequence[AttackAction]]] = []
        self.done = cfg.budget == 0
        if not self.done:
            self._collect()

    @property
    def clean_solution(self) -> Solution:
        return self._clean

    def _collect(self) -> None:
        self._pending = []
        for st in self._states:
            cands = problems.candidates(st.inst, st.ref)
            if len(cands) > 0:
                self._pending.append((st, cands))
        if not self._pending:
            self.done = True

    def pending(self) -> list[tuple[ProblemInstance, Solution, Sequence[AttackAction]]]:
        return [(st.inst, st.ref, cands) for st, cands in self._pending]

    def advance(self, scores_per_state: Sequence[Sequence[float]]) -> None:
        if self.done:
            raise RuntimeError("beam search already finished")
        if len(scores_per_state) != len(self._pending):
            raise ValueError(
                f"expected {len(self._pending)} score lists, got {len(scores_per_state)}"
            )
        b = self._cfg.beam
        children = []
        for si, ((st, cands), scores) in enumerate(zip(self._pending, scores_per_state)):
            if len(scores) != len(cands):
                raise ValueError(
                    f"state {si}: expected {len(cands)} scores, got {len(scores)}"
                )
            ranked = sorted(range(len(cands)), key=lambda i: (-float(scores[i]), i))
            for idx in ranked[:b]:
                a = cands[idx]
                inst = apply_action(st.inst, a)
                sol = self._ev(inst)
                g = degradation(self._sense, self._clean.cost, sol.cost)
                child = _State(inst, _ref(st.ref, sol), g, st.path + ((a, sol.cost),))
                self._best.offer(child, sol.cost)
                children.append((-g, a.a1, a.a2, si, child))
        children.sort(key=lambda c: c[:4])
        self._states = [c[4] for c in children[:b]]
        self._step += 1
        if self._step >= self._cfg.budget or not self._states:
            self.done = True
        else:
            self._collect()

    def result(self) -> AttackResult:
        return _result(self._best, self._clean, self._ev)


def attack_beam(policy: Policy, solver, instance: ProblemInstance,
                cfg: AttackConfig) -> AttackResult:
    """Iterative edge manipulation: per step, each kept state expands its
    top-B actions by policy score, the best-ever state is tracked, and the
    B highest-gain children survive."""
    driver = BeamDriver(solver, instance, cfg)
    while not driver.done:
        scores = [policy(inst, ref, cands) for inst, ref, cands in driver.pending()]
        driver.advance(scores)
    return driver.result()


def uniform_random_policy(seed: int) -> Policy:
    """Random scores; makes attack_beam behave like unguided beam sampling."""
    rng = random.Random(derive_seed(seed, "uniform-policy"))

    def score(inst, ref, cands):
        return [rng.random() for _ in range(len(cands))]

    return score


def run_attack(name: str, solver, instance: ProblemInstance,
               cfg: AttackConfig) -> AttackResult:
    if name == "baseline":
        return attack_random_baseline(solver, instance, cfg)
    if name == "ra":
        return attack_ra(solver, instance, cfg)
    if name == "og":
        return attack_og(solver, instance, cfg)
    if name == "sa":
        return attack_sa(solver, instance, cfg)
    if name == "beam":
        return attack_beam(uniform_random_policy(cfg.seed), solver, instance, cfg)
    raise KeyError(f"unknown attacker {name!r}")


ATTACKERS = ("baseline", "ra", "og", "sa", "beam")
