"""The black-box solver surface: handles, dispatch, builtins, adapters."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from typing import Optional

from ..core import ProblemInstance, Solution
from .builtin import (
    BUILTIN_SOLVERS,
    atsp_furthest_insertion,
    atsp_nearest_neighbour,
    dag_critical_path,
    dag_sjf,
    dag_tetris,
    mc_greedy,
    mcscc_greedy_average,
    mcscc_local,
)
from .external import SolverError, atsp_external, milp_external
from .ilp import export_ilp

EXECUTABLE_ENV_PREFIX = "SOLVERSTRESS_EXE_"


@dataclass(frozen=True)
class SolverHandle:
    """Opaque solver configuration: what to run and under which limits."""

    name: str
    problem: str
    kind: str = "builtin"  # "builtin" | "external"
    deterministic: bool = True
    time_limit: Optional[float] = None  # calibrated seconds, external only
    executable: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("builtin", "external"):
            raise ValueError(f"unknown solver kind {self.kind!r}")
        if self.kind == "external" and self.executable is None:
            raise ValueError("external solver handle needs an executable path")


def builtin_handle(name: str, time_limit: Optional[float] = None) -> SolverHandle:
    if name not in BUILTIN_SOLVERS:
        raise KeyError(f"unknown builtin solver {name!r}; have {sorted(BUILTIN_SOLVERS)}")
    problem, _ = BUILTIN_SOLVERS[name]
    return SolverHandle(name=name, problem=problem, time_limit=time_limit)


def external_handle(name: str, problem: str,
                    executable: Optional[str] = None,
                    time_limit: Optional[float] = None) -> SolverHandle:
    """External solver; the executable defaults to $SOLVERSTRESS_EXE_<NAME>."""
    if executable is None:
        env = EXECUTABLE_ENV_PREFIX + name.upper()
        executable = os.environ.get(env)
        if executable is None:
            raise SolverError(f"no executable for {name!r}: set {env} or pass a path")
    return SolverHandle(name=name, problem=problem, kind="external",
                        deterministic=False, time_limit=time_limit,
                        executable=executable)


def resolve_handle(name: str, time_limit: Optional[float] = None) -> SolverHandle:
    """CLI name resolution: builtin name, or ``ext:<problem>:<name>``."""
    if name.startswith("ext:"):
        parts = name.split(":", 2)
        if len(parts) != 3:
            raise ValueError("external solver syntax: ext:<problem>:<name>")
        return external_handle(parts[2], parts[1], time_limit=time_limit)
    return builtin_handle(name, time_limit=time_limit)


def solve(handle: SolverHandle, instance: ProblemInstance) -> Solution:
    """Run a solver on an instance; the cost is always re-evaluated locally."""
    if handle.problem != instance.problem:
        raise ValueError(
            f"solver {handle.name!r} targets {handle.problem}, instance is {instance.problem}"
        )
    if handle.kind == "builtin":
        _, fn = BUILTIN_SOLVERS[handle.name]
        return fn(instance)
    if instance.problem == "atsp":
        return atsp_external(instance, handle)
    if instance.problem in ("mc", "mcscc"):
        return milp_external(instance, handle)
    raise SolverError(f"no external adapter for problem {instance.problem!r}")


def solve_timed(handle: SolverHandle, instance: ProblemInstance) -> tuple[Solution, float]:
    t0 = time.perf_counter()
    sol = solve(handle, instance)
    return sol, time.perf_counter() - t0


__all__ = [
    "SolverHandle",
    "SolverError",
    "BUILTIN_SOLVERS",
    "builtin_handle",
    "external_handle",
    "resolve_handle",
    "solve",
    "solve_timed",
    "export_ilp",
    "atsp_external",
    "milp_external",
    "dag_sjf",
    "dag_critical_path",
    "dag_tetris",
    "atsp_nearest_neighbour",
    "atsp_furthest_insertion",
    "mc_greedy",
    "mcscc_local",
    "mcscc_greedy_average",
]
