"""Experiment orchestration over (solver x attacker x dataset) grids.

Each grid cell runs every test instance for the attacker's declared trial
count with derived seeds, persists raw per-trial results to its own JSON
file (making reruns resumable), and aggregation recomputes all statistics
from those raw files. Report CSV/JSON content is deterministic for a fixed
seed; wall-clock timings go to a separate sidecar.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .. import attackers, solvers
from ..attackers import AttackConfig, default_config, derive_seed
from .datasets import load_split

# Outer repetition counts used for the reported mean/std.
TRIALS_BY_ATTACKER = {"baseline": 100, "ra": 10, "og": 10, "sa": 10, "beam": 1}

CSV_COLUMNS = [
    "solver", "attacker", "dataset", "instances", "trials",
    "clean_mean", "attacked_mean", "attacked_std", "success_rate",
    "solver_calls",
]


@dataclass(frozen=True)
class GridCell:
    solver: str
    attacker: str
    dataset_dir: str

    @property
    def dataset_name(self) -> str:
        return os.path.basename(os.path.normpath(self.dataset_dir))

    def cell_id(self) -> str:
        return f"{self.solver}__{self.attacker}__{self.dataset_name}"


@dataclass
class ExperimentConfig:
    out_dir: str
    seed: int = 0
    split: str = "test"
    budget: int | None = None
    trials_override: dict = field(default_factory=dict)
    time_limit: float | None = None
    workers: int = 1


def attack_dataset(solver_name: str, attacker_name: str, dataset_dir: str,
                   split: str = "test", budget: int | None = None,
                   seed: int = 0, trials: int | None = None,
                   time_limit: float | None = None) -> dict:
    """Attack every instance of a dataset split; returns the raw cell dict."""
    handle = solvers.resolve_handle(solver_name, time_limit=time_limit)
    instances = load_split(dataset_dir, split)
    dataset_name = os.path.basename(os.path.normpath(dataset_dir))
    if trials is None:
        trials = TRIALS_BY_ATTACKER[attacker_name]
    rows = []
    for fname, inst in instances:
        clean = solvers.solve(handle, inst)
        trial_rows = []
        for t in range(trials):
            trial_seed = derive_seed(seed, solver_name, attacker_name,
                                     dataset_name, fname, t)
            acfg = default_config(inst.problem, attacker_name, seed=trial_seed,
                                  budget=budget)
            res = attackers.run_attack(attacker_name, handle, inst, acfg)
            trial_rows.append({
                "trial": t,
                "seed": trial_seed,
                "best_cost": res.best_cost,
                "gain": res.gain,
                "evaluations": res.evaluations,
                "trace": [[a.a1, a.a2, c] for a, c in res.trace],
            })
        rows.append({"file": fname, "clean_cost": clean.cost, "trials": trial_rows})
    return {
        "solver": solver_name,
        "attacker": attacker_name,
        "dataset": dataset_name,
        "split": split,
        "seed": seed,
        "trials": trials,
        "instances": rows,
    }


def run_cell(cell: GridCell, cfg: ExperimentConfig) -> dict:
    """Run one (solver, attacker, dataset) cell; resumable via its file."""
    os.makedirs(os.path.join(cfg.out_dir, "cells"), exist_ok=True)
    path = os.path.join(cfg.out_dir, "cells", cell.cell_id() + ".json")
    if os.path.exists(path):
        with open(path) as f:
            return json.load(f)
    started = time.perf_counter()
    result = attack_dataset(cell.solver, cell.attacker, cell.dataset_dir,
                            split=cfg.split, budget=cfg.budget, seed=cfg.seed,
                            trials=cfg.trials_override.get(cell.attacker),
                            time_limit=cfg.time_limit)
    wall = time.perf_counter() - started
    with open(path, "w") as f:
        json.dump(result, f, sort_keys=True, indent=1)
        f.write("\n")
    _record_timing(cfg.out_dir, cell.cell_id(), wall)
    return result


def _record_timing(out_dir: str, cell_id: str, wall: float) -> None:
    path = os.path.join(out_dir, "timings.json")
    timings = {}
    if os.path.exists(path):
        with open(path) as f:
            timings = json.load(f)
    timings[cell_id] = wall
    with open(path, "w") as f:
        json.dump(timings, f, sort_keys=True, indent=1)
        f.write("\n")


def _run_cell_star(args):
    return run_cell(*args)


def run_experiment(cells: list[GridCell], cfg: ExperimentConfig) -> list[dict]:
    """Run the whole grid (optionally in a worker pool) and aggregate."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    results = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_cell_star, [(c, cfg) for c in cells]))
    else:
        for cell in cells:
            try:
                results.append(run_cell(cell, cfg))
            except Exception as e:  # record the failure, keep the run going
                results.append({
                    "solver": cell.solver, "attacker": cell.attacker,
                    "dataset": cell.dataset_name, "error": str(e),
                })
    return aggregate(results)


def aggregate(cell_results: list[dict]) -> list[dict]:
    """Recompute report rows from raw per-trial costs (no lossy aggregation)."""
    rows = []
    for cell in cell_results:
        if "error" in cell:
            rows.append({"solver": cell["solver"], "attacker": cell["attacker"],
                         "dataset": cell["dataset"], "error": cell["error"]})
            continue
        instances = cell["instances"]
        trials = cell["trials"]
        clean_mean = _mean([r["clean_cost"] for r in instances])
        per_trial_means = []
        for t in range(trials):
            per_trial_means.append(_mean(
                [r["trials"][t]["best_cost"] for r in instances]))
        successes = sum(1 for r in instances for tr in r["trials"] if tr["gain"] > 0)
        total = sum(len(r["trials"]) for r in instances)
        rows.append({
            "solver": cell["solver"],
            "attacker": cell["attacker"],
            "dataset": cell["dataset"],
            "instances": len(instances),
            "trials": trials,
            "clean_mean": clean_mean,
            "attacked_mean": _mean(per_trial_means),
            "attacked_std": statistics.stdev(per_trial_means) if trials > 1 else 0.0,
            "success_rate": successes / total if total else 0.0,
            "solver_calls": sum(tr["evaluations"]
                                for r in instances for tr in r["trials"]),
        })
    rows.sort(key=lambda r: (r["solver"], r["attacker"], r["dataset"]))
    return rows


def _mean(xs):
    return sum(xs) / len(xs) if xs else 0.0


def load_cells(out_dir: str) -> list[dict]:
    cell_dir = os.path.join(out_dir, "cells")
    results = []
    if not os.path.isdir(cell_dir):
        return results
    for fname in sorted(os.listdir(cell_dir)):
        if fname.endswith(".json"):
            with open(os.path.join(cell_dir, fname)) as f:
                results.append(json.load(f))
    return results


def report_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore",
                            lineterminator="\n")
    writer.writeheader()
    for row in rows:
        out = dict(row)
        for key in ("clean_mean", "attacked_mean", "attacked_std", "success_rate"):
            if key in out and isinstance(out[key], float):
                out[key] = repr(out[key])
        writer.writerow(out)
    return buf.getvalue()


def report_json(rows: list[dict]) -> str:
    return json.dumps(rows, sort_keys=True, indent=1) + "\n"


def report_markdown(rows: list[dict]) -> str:
    head = "| " + " | ".join(CSV_COLUMNS) + " |"
    sep = "|" + "|".join("---" for _ in CSV_COLUMNS) + "|"
    lines = [head, sep]
    for row in rows:
        cells = []
        for col in CSV_COLUMNS:
            v = row.get(col, "")
            if isinstance(v, float):
                v = f"{v:.4f}"
            cells.append(str(v))
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
