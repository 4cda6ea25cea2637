"""Subprocess adapters for external solvers.

Adapters communicate through files only. The invocation contract is

    executable <input-file> <output-file> [time-limit-seconds]

with exit code 0 on success. Input/output grammars (ATSP matrix, tour file,
LP file, assignment file) are documented in the README; they are simple
enough to satisfy with a few-line stub script, which is how the test suite
exercises these adapters.
"""

from __future__ import annotations

import os
import subprocess
import tempfile
import time

from .. import problems
from ..core import ProblemInstance, Solution
from .ilp import export_ilp


class SolverError(RuntimeError):
    """Launch failure or malformed external-solver output."""


def atsp_matrix_text(inst: ProblemInstance) -> str:
    """n on the first line, then n rows of n space-separated weights."""
    d = problems._atsp_matrix(inst)
    n = inst.graph.node_count
    rows = [str(n)]
    for i in range(n):
        rows.append(" ".join(repr(float(x)) for x in d[i]))
    return "\n".join(rows) + "\n"


def _run(handle, in_path: str, out_path: str) -> bool:
    """Run the adapter; True on completion, False on wall-clock timeout."""
    argv = [handle.executable, in_path, out_path]
    if handle.time_limit is not None:
        argv.append(repr(float(handle.time_limit)))
    try:
        proc = subprocess.run(
            argv,
            timeout=handle.time_limit,
            capture_output=True,
            text=True,
        )
    except subprocess.TimeoutExpired:
        return False
    except OSError as e:
        raise SolverError(f"failed to launch {handle.executable!r}: {e}") from e
    if proc.returncode != 0:
        raise SolverError(
            f"{handle.executable!r} exited with {proc.returncode}: {proc.stderr.strip()[:500]}"
        )
    return True


def atsp_external(inst: ProblemInstance, handle) -> Solution:
    """Write the distance matrix, run the solver, re-score the parsed tour."""
    n = inst.graph.node_count
    with tempfile.TemporaryDirectory(prefix="sstress_atsp_") as tmp:
        in_path = os.path.join(tmp, "matrix.txt")
        out_path = os.path.join(tmp, "tour.txt")
        with open(in_path, "w") as f:
            f.write(atsp_matrix_text(inst))
        finished = _run(handle, in_path, out_path)
        if not finished:
            return problems.flagged_solution(inst, (), "timeout")
        try:
            with open(out_path) as f:
                tokens = f.read().split()
        except OSError as e:
            raise SolverError(f"missing tour file: {e}") from e
    try:
        tour = [int(t) for t in tokens]
    except ValueError as e:
        raise SolverError(f"tour file is not a list of ints: {e}") from e
    if sorted(tour) != list(range(n)):
        raise SolverError(f"tour is not a permutation of 0..{n - 1}")
    return problems.evaluate(inst, tour)


def parse_assignment(text: str) -> dict[str, float]:
    """Parse `<name> <value>` lines; '#' starts a comment."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SolverError(f"assignment line {lineno}: expected '<name> <value>'")
        try:
            values[parts[0]] = float(parts[1])
        except ValueError as e:
            raise SolverError(f"assignment line {lineno}: bad value {parts[1]!r}") from e
    return values


def milp_external(inst: ProblemInstance, handle) -> Solution:
    """Export the ILP, run the solver, rebuild the set selection, re-score.

    A timeout with a parseable incumbent in the output file uses that
    incumbent; a timeout without one is flagged. The externally reported
    objective is never trusted: the selection is re-scored locally, and an
    infeasible assignment is flagged as a worst-case solution.
    """
    lp_text = export_ilp(inst)
    started = time.perf_counter()
    with tempfile.TemporaryDirectory(prefix="sstress_milp_") as tmp:
        in_path = os.path.join(tmp, "problem.lp")
        out_path = os.path.join(tmp, "solution.txt")
        with open(in_path, "w") as f:
            f.write(lp_text)
        finished = _run(handle, in_path, out_path)
        text = None
        try:
            with open(out_path) as f:
                text = f.read()
        except OSError:
            pass
    wall = time.perf_counter() - started
    if text is None:
        if not finished:
            return problems.flagged_solution(inst, (), "timeout")
        raise SolverError("solver exited without writing a solution file")
    try:
        values = parse_assignment(text)
    except SolverError:
        if not finished:
            return problems.flagged_solution(inst, (), "timeout")
        raise
    selected = sorted(
        int(name[2:]) for name, v in values.items()
        if name.startswith("X_") and v > 0.5
    )
    try:
        sol = problems.evaluate(inst, selected)
    except problems.FeasibilityError:
        return problems.flagged_solution(inst, tuple(selected), "infeasible")
    _LAST_WALL[0] = wall
    return sol


_LAST_WALL = [0.0]


def last_milp_wall_time() -> float:
    return _LAST_WALL[0]
