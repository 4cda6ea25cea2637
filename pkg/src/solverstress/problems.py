"""Per-problem cost evaluation, feasibility, attack candidates, and exact optima.

Cost evaluation is pure: the same (instance, payload) pair always yields the
bit-identical cost. Numeric inner loops are delegated to
:mod:`solverstress._kernels`.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .core import (
    COST_ATOL,
    AttackAction,
    Color,
    Kind,
    Op,
    ProblemInstance,
    Sense,
    Solution,
)


class FeasibilityError(ValueError):
    """Payload violates the instance's constraints."""


class SizeGuardError(ValueError):
    """Instance too large for the exhaustive optimum."""


BRUTE_FORCE_LIMITS = {"dag": 9, "atsp": 9, "mc": 12, "mcscc": 12}


@dataclass(frozen=True)
class Schedule:
    starts: tuple[float, ...]
    finishes: tuple[float, ...]
    makespan: float


# ---------------------------------------------------------------------------
# Instance views (numpy arrays for the kernels, cached per instance)


def _memo(inst: ProblemInstance) -> dict:
    return inst.__dict__.setdefault("_views", {})


def _dag_views(inst: ProblemInstance):
    memo = _memo(inst)
    v = memo.get("dag")
    if v is None:
        g = inst.graph
        n = g.node_count
        durations = np.asarray([a.duration for a in g.nodes], dtype=np.float64)
        resources = np.asarray([a.resource for a in g.nodes], dtype=np.float64)
        n_parents = np.zeros(n, dtype=np.int64)
        succ: list[list[int]] = [[] for _ in range(n)]
        for u, vv, _ in g.edges:
            succ[u].append(vv)
            n_parents[vv] += 1
        indptr = np.zeros(n + 1, dtype=np.int64)
        flat: list[int] = []
        for u in range(n):
            flat.extend(succ[u])
            indptr[u + 1] = len(flat)
        succ_list = np.asarray(flat, dtype=np.int64)
        v = (durations, resources, n_parents, indptr, succ_list)
        memo["dag"] = v
    return v


def _atsp_matrix(inst: ProblemInstance) -> np.ndarray:
    memo = _memo(inst)
    d = memo.get("atsp")
    if d is None:
        n = inst.graph.node_count
        d = np.zeros((n, n), dtype=np.float64)
        for u, v, w in inst.graph.edges:
            d[u, v] = w
        memo["atsp"] = d
    return d


def _coverage_views(inst: ProblemInstance):
    """(indptr, members, weights, is_white, member_sets) with element ids
    rebased to 0..n_elements-1."""
    memo = _memo(inst)
    v = memo.get("cov")
    if v is None:
        g = inst.graph
        m = g.set_count
        n_el = g.node_count - m
        weights = np.asarray([g.nodes[m + e].weight for e in range(n_el)], dtype=np.float64)
        is_white = np.asarray(
            [1 if g.nodes[m + e].color is Color.WHITE else 0 for e in range(n_el)],
            dtype=np.uint8,
        )
        per_set: list[list[int]] = [[] for _ in range(m)]
        for u, vv, _ in g.edges:
            per_set[u].append(vv - m)
        indptr = np.zeros(m + 1, dtype=np.int64)
        flat: list[int] = []
        for s in range(m):
            flat.extend(per_set[s])
            indptr[s + 1] = len(flat)
        members = np.asarray(flat, dtype=np.int64)
        member_sets = tuple(frozenset(row) for row in per_set)
        v = (indptr, members, weights, is_white, member_sets)
        memo["cov"] = v
    return v


# ---------------------------------------------------------------------------
# Cost evaluation


def _check_permutation(inst: ProblemInstance, payload: Sequence[int], what: str) -> None:
    n = inst.graph.node_count
    if len(payload) != n or sorted(payload) != list(range(n)):
        raise FeasibilityError(f"{what} payload is not a permutation of 0..{n - 1}")


def dag_simulate(inst: ProblemInstance, priority: Sequence[int]) -> Schedule:
    """Event-driven list schedule for the given priority permutation."""
    _check_permutation(inst, priority, "priority")
    n = inst.graph.node_count
    if n == 0:
        return Schedule((), (), 0.0)
    durations, resources, n_parents, indptr, succ_list = _dag_views(inst)
    prio = np.asarray(list(priority), dtype=np.int64)
    starts, finishes = K.dag_schedule(durations, resources, n_parents, indptr, succ_list, prio)
    return Schedule(tuple(starts.tolist()), tuple(finishes.tolist()),
                    float(finishes.max()) if n else 0.0)


def dag_cost(inst: ProblemInstance, payload: Sequence[int]) -> float:
    return dag_simulate(inst, payload).makespan


def atsp_cost(inst: ProblemInstance, payload: Sequence[int]) -> float:
    _check_permutation(inst, payload, "tour")
    tour = np.asarray(list(payload), dtype=np.int64)
    return float(K.atsp_tour_cost(_atsp_matrix(inst), tour))


def _check_selection(inst: ProblemInstance, payload: Sequence[int]) -> list[int]:
    m = inst.graph.set_count
    sel = list(payload)
    if len(set(sel)) != len(sel):
        raise FeasibilityError("selected-sets payload contains duplicates")
    for s in sel:
        if not (0 <= s < m):
            raise FeasibilityError(f"selected set id {s} out of range")
    return sorted(sel)


def mc_cost(inst: ProblemInstance, payload: Sequence[int]) -> float:
    sel = _check_selection(inst, payload)
    if len(sel) > inst.k_sets:
        raise FeasibilityError(f"selected {len(sel)} sets, budget is {inst.k_sets}")
    indptr, members, weights, is_white, _ = _coverage_views(inst)
    black, _ = K.coverage_stats(indptr, members, weights, is_white,
                                np.asarray(sel, dtype=np.int64))
    return float(black)


def mcscc_cost(inst: ProblemInstance, payload: Sequence[int]) -> float:
    sel = _check_selection(inst, payload)
    indptr, members, weights, is_white, _ = _coverage_views(inst)
    black, whites = K.coverage_stats(indptr, members, weights, is_white,
                                     np.asarray(sel, dtype=np.int64))
    if whites > inst.k_white:
        raise FeasibilityError(f"covers {whites} white elements, cap is {inst.k_white}")
    return float(black)


_COST_FNS = {"dag": dag_cost, "atsp": atsp_cost, "mc": mc_cost, "mcscc": mcscc_cost}


def cost(inst: ProblemInstance, payload: Sequence[int]) -> float:
    return _COST_FNS[inst.problem](inst, payload)


def evaluate(inst: ProblemInstance, payload: Sequence[int]) -> Solution:
    """Re-evaluate a payload into a Solution (raises FeasibilityError)."""
    return Solution(payload=tuple(payload), cost=cost(inst, payload), sense=inst.sense)


def is_feasible(inst: ProblemInstance, payload: Sequence[int]) -> bool:
    try:
        cost(inst, payload)
        return True
    except FeasibilityError:
        return False


def worst_cost(sense: Sense) -> float:
    return math.inf if sense is Sense.MIN else 0.0


def flagged_solution(inst: ProblemInstance, payload: Sequence[int], status: str) -> Solution:
    return Solution(payload=tuple(payload), cost=worst_cost(inst.sense),
                    sense=inst.sense, status=status)


def validate_schedule(inst: ProblemInstance, sched: Schedule, atol: float = 1e-9) -> None:
    """Assert the three schedule invariants (used by tests and fuzzers)."""
    g = inst.graph
    n = g.node_count
    for v in range(n):
        d = g.nodes[v].duration
        if abs(sched.finishes[v] - (sched.starts[v] + d)) > atol:
            raise AssertionError(f"job {v}: finish != start + duration")
    for u, v, _ in g.edges:
        if sched.starts[v] < sched.finishes[u] - atol:
            raise AssertionError(f"precedence ({u},{v}) violated")
    # capacity is piecewise constant; checking at start instants suffices
    for v in range(n):
        t = sched.starts[v]
        load = sum(g.nodes[j].resource for j in range(n)
                   if sched.starts[j] <= t < sched.finishes[j])
        if load > 1.0 + 1e-6:
            raise AssertionError(f"capacity exceeded at t={t}: load {load}")
    ms = max(sched.finishes) if n else 0.0
    if abs(sched.makespan - ms) > atol:
        raise AssertionError("makespan != max finish")


# ---------------------------------------------------------------------------
# Attack-action candidates


class _LazyActions(Sequence):
    """Deterministic lex-ordered, duplicate-free virtual action list."""

    def __len__(self):  # pragma: no cover - overridden
        raise NotImplementedError

    def _at(self, i: int) -> AttackAction:  # pragma: no cover - overridden
        raise NotImplementedError

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self._at(j) for j in range(*i.indices(len(self)))]
        n = len(self)
        if i < 0:
            i += n
        if not (0 <= i < n):
            raise IndexError(i)
        return self._at(i)


class _AtspCandidates(_LazyActions):
    """All directed edges except the n edges of the reference tour."""

    def __init__(self, n: int, tour: Sequence[int]):
        self._n = n
        succ = [0] * n
        for i, c in enumerate(tour):
            succ[c] = tour[(i + 1) % n]
        self._succ = succ

    def __len__(self):
        return self._n * (self._n - 2) if self._n >= 2 else 0

    def _at(self, i: int) -> AttackAction:
        row, off = divmod(i, self._n - 2)
        a, b = sorted((row, self._succ[row]))
        j = off
        if j >= a:
            j += 1
        if j >= b:
            j += 1
        return AttackAction(Op.HALVE_EDGE, row, j)


class _CoverageCandidates(_LazyActions):
    """Absent (unchosen set, target element) pairs, lex-ordered."""

    def __init__(self, inst: ProblemInstance, excluded_sets: frozenset[int]):
        g = inst.graph
        m = g.set_count
        _, _, _, is_white, member_sets = _coverage_views(inst)
        if inst.problem == "mcscc":
            targets = [e for e in range(g.node_count - m) if not is_white[e]]
        else:
            targets = list(range(g.node_count - m))
        tpos = {e: i for i, e in enumerate(targets)}
        self._m = m
        self._targets = targets
        self._offset = m  # element node id = offset + element index
        rows = [s for s in range(m) if s not in excluded_sets]
        self._rows = rows
        blocked = []
        counts = []
        for s in rows:
            bl = sorted(tpos[e] for e in member_sets[s] if e in tpos)
            blocked.append(bl)
            counts.append(len(targets) - len(bl))
        self._blocked = blocked
        cum = [0]
        for c in counts:
            cum.append(cum[-1] + c)
        self._cum = cum

    def __len__(self):
        return self._cum[-1]

    def _at(self, i: int) -> AttackAction:
        r = bisect_right(self._cum, i) - 1
        pos = i - self._cum[r]
        for b in self._blocked[r]:
            if b <= pos:
                pos += 1
            else:
                break
        e = self._targets[pos]
        return AttackAction(Op.ADD_EDGE, self._rows[r], self._offset + e)


def candidates(inst: ProblemInstance, last_solution: Solution) -> Sequence[AttackAction]:
    """Valid attack actions, narrowed by the solver's last solution."""
    problem = inst.problem
    if problem == "dag":
        return [AttackAction(Op.REMOVE_EDGE, u, v) for u, v, _ in inst.graph.edges]
    if problem == "atsp":
        return _AtspCandidates(inst.graph.node_count, last_solution.payload)
    return _CoverageCandidates(inst, frozenset(last_solution.payload))


def all_valid_actions(inst: ProblemInstance) -> Sequence[AttackAction]:
    """The full (un-narrowed) valid action space; meant for small instances."""
    problem = inst.problem
    if problem == "dag":
        return [AttackAction(Op.REMOVE_EDGE, u, v) for u, v, _ in inst.graph.edges]
    if problem == "atsp":
        n = inst.graph.node_count
        return [AttackAction(Op.HALVE_EDGE, i, j)
                for i in range(n) for j in range(n) if i != j]
    return _CoverageCandidates(inst, frozenset())


# ---------------------------------------------------------------------------
# Exact small-scale optima


def _guard(inst: ProblemInstance, size: int) -> None:
    limit = BRUTE_FORCE_LIMITS[inst.problem]
    if size > limit:
        raise SizeGuardError(
            f"{inst.problem} instance of size {size} exceeds exhaustive limit {limit}"
        )


def _dag_forward_cp(inst: ProblemInstance) -> list[float]:
    """cp(v) = duration(v) + max over children cp(child) (0 if none)."""
    g = inst.graph
    n = g.node_count
    succ: list[list[int]] = [[] for _ in range(n)]
    for u, v, _ in g.edges:
        succ[u].append(v)
    cp = [0.0] * n
    order = sorted(range(n), key=lambda v: -_depth(succ, v))
    # simple memoized recursion instead: process in reverse topological order
    seen = [False] * n
    def rec(v: int) -> float:
        if seen[v]:
            return cp[v]
        seen[v] = True
        best = 0.0
        for c in succ[v]:
            x = rec(c)
            if x > best:
                best = x
        cp[v] = g.nodes[v].duration + best
        return cp[v]
    for v in range(n):
        rec(v)
    return cp


def _depth(succ, v):  # helper kept trivial; depth only orders the recursion
    return 0


def dag_brute_force_schedule(inst: ProblemInstance) -> Schedule:
    """True resource-constrained optimum by branching over start subsets at
    each decision epoch, idling permitted."""
    g = inst.graph
    n = g.node_count
    _guard(inst, n)
    if n == 0:
        return Schedule((), (), 0.0)
    dur = [a.duration for a in g.nodes]
    res = [a.resource for a in g.nodes]
    preds: list[list[int]] = [[] for _ in range(n)]
    for u, v, _ in g.edges:
        preds[v].append(u)
    cp = _dag_forward_cp(inst)

    # seed the incumbent with a few list schedules
    best_ms = math.inf
    best_sched: Schedule | None = None
    for prio in ([*range(n)],
                 sorted(range(n), key=lambda v: (dur[v], v)),
                 sorted(range(n), key=lambda v: (-cp[v], v))):
        s = dag_simulate(inst, prio)
        if s.makespan < best_ms:
            best_ms = s.makespan
            best_sched = s

    starts = [0.0] * n
    full_mask = (1 << n) - 1
    pred_masks = [0] * n
    for v in range(n):
        for p in preds[v]:
            pred_masks[v] |= 1 << p

    def rec(t: float, running: tuple[tuple[float, int], ...], started: int,
            finished: int, cap: float) -> None:
        nonlocal best_ms, best_sched
        if started == full_mask:
            ms = t
            for f, _ in running:
                if f > ms:
                    ms = f
            if ms < best_ms - 1e-12:
                best_ms = ms
                fins = list(starts)
                for v in range(n):
                    fins[v] = starts[v] + dur[v]
                best_sched = Schedule(tuple(starts), tuple(fins), ms)
            return
        # lower bounds
        lb = t
        for f, v in running:
            x = f
            if x > lb:
                lb = x
        area = 0.0
        for v in range(n):
            if not (started >> v) & 1:
                area += dur[v] * res[v]
                if t + cp[v] > lb:
                    lb = t + cp[v]
        for f, v in running:
            area += (f - t) * res[v]
        if t + area > lb:
            lb = t + area
        if lb >= best_ms - 1e-12:
            return
        ready = [v for v in range(n)
                 if not (started >> v) & 1 and (pred_masks[v] & finished) == pred_masks[v]]
        # enumerate feasible subsets of ready (bit i of choice = ready[i])
        nr = len(ready)
        for choice in range(1 << nr):
            sel = [ready[i] for i in range(nr) if (choice >> i) & 1]
            need = 0.0
            for v in sel:
                need += res[v]
            if need > cap + 1e-9:
                continue
            if not sel and not running:
                continue  # nothing running and nothing started: stall
            run2 = list(running)
            st2 = started
            for v in sel:
                starts[v] = t
                run2.append((t + dur[v], v))
                st2 |= 1 << v
            tmin = min(f for f, _ in run2)
            still = []
            fin2 = finished
            cap2 = cap - need
            for f, v in run2:
                if f == tmin:
                    fin2 |= 1 << v
                    cap2 += res[v]
                else:
                    still.append((f, v))
            rec(tmin, tuple(still), st2, fin2, cap2)

    rec(0.0, (), 0, 0, 1.0)
    assert best_sched is not None
    return best_sched


def brute_force_optimum(inst: ProblemInstance) -> Solution:
    """Exact optimum for small instances (see BRUTE_FORCE_LIMITS).

    For DAG instances the cost is the true schedule optimum, which can beat
    every priority-list schedule; the payload is the optimal schedule's
    start-time order and may re-evaluate to a larger makespan.
    """
    problem = inst.problem
    if problem == "dag":
        sched = dag_brute_force_schedule(inst)
        order = sorted(range(inst.graph.node_count),
                       key=lambda v: (sched.starts[v], v))
        return Solution(payload=tuple(order), cost=sched.makespan, sense=Sense.MIN)
    if problem == "atsp":
        n = inst.graph.node_count
        _guard(inst, n)
        tour, c = K.atsp_brute_force(_atsp_matrix(inst))
        return Solution(payload=tuple(int(x) for x in tour), cost=float(c), sense=Sense.MIN)
    m = inst.graph.set_count
    _guard(inst, m)
    indptr, members, weights, is_white, _ = _coverage_views(inst)
    best_cost = -math.inf
    best_sel: tuple[int, ...] = ()
    for mask in range(1 << m):
        sel = [s for s in range(m) if (mask >> s) & 1]
        if problem == "mc" and len(sel) > inst.k_sets:
            continue
        black, whites = K.coverage_stats(indptr, members, weights, is_white,
                                         np.asarray(sel, dtype=np.int64))
        if problem == "mcscc" and whites > inst.k_white:
            continue
        if black > best_cost:
            best_cost = black
            best_sel = tuple(sel)
    return Solution(payload=best_sel, cost=float(best_cost), sense=Sense.MAX)
