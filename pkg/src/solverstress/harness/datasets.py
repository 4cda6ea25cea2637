"""Seed-reproducible dataset generation and loading.

A dataset is a directory of canonical instance files plus a manifest listing
the file names and the generation seed. Same spec + seed => byte-identical
directory contents.
"""

from __future__ import annotations

import json
import math
import os
import random
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..attackers import derive_seed
from ..core import (
    Color,
    ProblemInstance,
    atsp_instance,
    coverage_instance,
    dag_instance,
    deserialize_instance,
    serialize_instance,
)
from .._kernels import tmat_close

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class DatasetSpec:
    problem: str
    name: str
    params: dict
    n_train: int = 50
    n_test: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.problem not in ("dag", "atsp", "mc", "mcscc"):
            raise ValueError(f"unknown problem {self.problem!r}")
        if self.n_train < 0 or self.n_test < 0 or self.n_train + self.n_test < 1:
            raise ValueError("need at least one instance")
        merged = dict(_PARAM_DEFAULTS[self.problem])
        merged.update(self.params)
        object.__setattr__(self, "params", merged)
        for key, value in merged.items():
            if key not in _PARAM_DEFAULTS[self.problem]:
                raise ValueError(f"unknown param {key!r} for {self.problem}")
            if isinstance(value, (int, float)) and value < 0:
                raise ValueError(f"param {key!r} must be >= 0")


_PARAM_DEFAULTS = {
    "dag": {"jobs": 50, "layers": None, "density": 0.4,
            "duration_range": (1.0, 100.0), "resource_range": (0.05, 0.6)},
    "atsp": {"cities": 20, "max_weight": 10 ** 6},
    "mc": {"sets": 100, "elements": 200, "k_sets": None, "max_weight": 100,
           "membership": 2.0},
    "mcscc": {"sets": 30, "blacks": 150, "whites": 3000, "k_white": None,
              "dominant_frac": 0.1},
}


def spec_from_obj(obj: dict) -> DatasetSpec:
    return DatasetSpec(
        problem=obj["problem"],
        name=obj.get("name", obj["problem"]),
        params=dict(obj.get("params", {})),
        n_train=int(obj.get("n_train", 50)),
        n_test=int(obj.get("n_test", 10)),
        seed=int(obj.get("seed", 0)),
    )


# Dataset shapes used in the evaluation grids.
PRESETS = {
    "dag-50": dict(problem="dag", params={"jobs": 50}, n_train=50, n_test=10),
    "dag-100": dict(problem="dag", params={"jobs": 100}, n_train=50, n_test=10),
    "dag-150": dict(problem="dag", params={"jobs": 150}, n_train=50, n_test=10),
    "atsp-20": dict(problem="atsp", params={"cities": 20}, n_train=50, n_test=20),
    "atsp-50": dict(problem="atsp", params={"cities": 50}, n_train=50, n_test=20),
    "atsp-100": dict(problem="atsp", params={"cities": 100}, n_train=50, n_test=20),
    "mc-100-200": dict(problem="mc", params={"sets": 100, "elements": 200},
                       n_train=50, n_test=20),
    "mc-150-300": dict(problem="mc", params={"sets": 150, "elements": 300},
                       n_train=50, n_test=20),
    "mc-200-400": dict(problem="mc", params={"sets": 200, "elements": 400},
                       n_train=50, n_test=20),
    "mcscc-30-150-3000": dict(problem="mcscc",
                              params={"sets": 30, "blacks": 150, "whites": 3000},
                              n_train=50, n_test=10),
    "mcscc-60-300-6000": dict(problem="mcscc",
                              params={"sets": 60, "blacks": 300, "whites": 6000},
                              n_train=50, n_test=10),
    "mcscc-100-500-10000": dict(problem="mcscc",
                                params={"sets": 100, "blacks": 500, "whites": 10000},
                                n_train=50, n_test=10),
}


def preset_spec(name: str, seed: int = 0) -> DatasetSpec:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; have {sorted(PRESETS)}")
    d = PRESETS[name]
    return DatasetSpec(problem=d["problem"], name=name, params=dict(d["params"]),
                       n_train=d["n_train"], n_test=d["n_test"], seed=seed)


# ---------------------------------------------------------------------------
# Generators


def gen_dag(rng: random.Random, params: dict) -> ProblemInstance:
    n = int(params["jobs"])
    lo_d, hi_d = params["duration_range"]
    lo_r, hi_r = params["resource_range"]
    jobs = []
    for _ in range(n):
        duration = math.exp(rng.uniform(math.log(lo_d), math.log(hi_d)))
        resource = rng.uniform(lo_r, hi_r)
        jobs.append((duration, resource))
    layers = params["layers"] or max(2, round(math.sqrt(n)))
    layer_of = [rng.randrange(layers) for _ in range(n)]
    density = params["density"]
    edges = []
    for u in range(n):
        for v in range(n):
            if layer_of[u] < layer_of[v]:
                gap = layer_of[v] - layer_of[u]
                if rng.random() < density * (0.3 ** (gap - 1)):
                    edges.append((u, v))
    return dag_instance(jobs, edges)


def gen_atsp(rng: random.Random, params: dict) -> ProblemInstance:
    """'tmat'-style instance: random integer weights closed under the
    triangle inequality by repeated relaxation."""
    n = int(params["cities"])
    hi = int(params["max_weight"])
    d = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            if i != j:
                d[i, j] = float(rng.randint(1, hi))
    tmat_close(d)
    return atsp_instance(d.tolist())


def gen_mc(rng: random.Random, params: dict) -> ProblemInstance:
    m = int(params["sets"])
    n_el = int(params["elements"])
    k_sets = params["k_sets"] or max(2, m // 10)
    p = min(1.0, params["membership"] / m)
    memberships = []
    for _ in range(m):
        members = [e for e in range(n_el) if rng.random() < p]
        memberships.append(members)
    weights = [float(rng.randint(1, int(params["max_weight"]))) for _ in range(n_el)]
    return coverage_instance(memberships, weights, k_sets=int(k_sets))


def gen_mcscc(rng: random.Random, params: dict) -> ProblemInstance:
    """Black weights ~ U[0,1]; per-set coverage counts from wide Gaussians
    with a few dominant sets covering most of the black mass."""
    m = int(params["sets"])
    n_b = int(params["blacks"])
    n_w = int(params["whites"])
    k_white = params["k_white"] or max(1, n_w // 20)
    k_white = int(k_white)
    n_dom = max(1, round(m * params["dominant_frac"]))
    weights = [rng.random() for _ in range(n_b)] + [0.0] * n_w
    colors = [Color.BLACK] * n_b + [Color.WHITE] * n_w

    def gauss_count(mean: float, std: float, cap: int) -> int:
        return max(0, min(cap, round(rng.gauss(mean, std))))

    memberships = []
    for s in range(m):
        if s < n_dom:
            nb = gauss_count(0.4 * n_b, 0.1 * n_b, n_b)
            nw = gauss_count(1.2 * k_white, 0.5 * k_white, n_w)
        else:
            nb = gauss_count(0.05 * n_b, 0.05 * n_b, n_b)
            nw = gauss_count(0.15 * k_white, 0.1 * k_white, n_w)
        blacks = rng.sample(range(n_b), nb)
        whites = [n_b + e for e in rng.sample(range(n_w), nw)]
        memberships.append(blacks + whites)
    return coverage_instance(memberships, weights, colors=colors, k_white=k_white)


_GENERATORS = {"dag": gen_dag, "atsp": gen_atsp, "mc": gen_mc, "mcscc": gen_mcscc}


def generate_instance(spec: DatasetSpec, split: str, index: int) -> ProblemInstance:
    rng = random.Random(derive_seed(spec.seed, "dataset", spec.name, split, index))
    return _GENERATORS[spec.problem](rng, spec.params)


def generate_dataset(spec: DatasetSpec, out_dir: str) -> dict:
    """Write all instances plus the manifest; returns the manifest dict."""
    os.makedirs(out_dir, exist_ok=True)
    manifest = {
        "format_version": 1,
        "name": spec.name,
        "problem": spec.problem,
        "params": {k: list(v) if isinstance(v, tuple) else v
                   for k, v in spec.params.items()},
        "seed": spec.seed,
        "n_train": spec.n_train,
        "n_test": spec.n_test,
        "train": [],
        "test": [],
    }
    for split, count in (("train", spec.n_train), ("test", spec.n_test)):
        for i in range(count):
            inst = generate_instance(spec, split, i)
            fname = f"{split}_{i:04d}.json"
            with open(os.path.join(out_dir, fname), "wb") as f:
                f.write(serialize_instance(inst))
            manifest[split].append(fname)
    with open(os.path.join(out_dir, MANIFEST_NAME), "w") as f:
        json.dump(manifest, f, sort_keys=True, indent=1)
        f.write("\n")
    return manifest


def load_manifest(dataset_dir: str) -> dict:
    with open(os.path.join(dataset_dir, MANIFEST_NAME)) as f:
        return json.load(f)


def load_split(dataset_dir: str, split: str) -> list[tuple[str, ProblemInstance]]:
    manifest = load_manifest(dataset_dir)
    if split not in ("train", "test"):
        raise ValueError("split must be 'train' or 'test'")
    out = []
    for fname in manifest[split]:
        with open(os.path.join(dataset_dir, fname), "rb") as f:
            out.append((fname, deserialize_instance(f.read())))
    return out


def load_instance_file(path: str) -> ProblemInstance:
    with open(path, "rb") as f:
        return deserialize_instance(f.read())


def load_orlib_scp(path: str, k_sets: int,
                   unit_weights: bool = True) -> ProblemInstance:
    """Load an ORLIB set-covering file as a coverage instance.

    Format: `rows cols`, then `cols` column costs, then per row the count of
    covering columns followed by 1-based column ids. Rows become elements
    (unit weight unless column costs are reused), columns become sets.
    """
    with open(path) as f:
        tokens = f.read().split()
    it = iter(tokens)
    n_rows = int(next(it))
    n_cols = int(next(it))
    costs = [float(next(it)) for _ in range(n_cols)]
    memberships: list[list[int]] = [[] for _ in range(n_cols)]
    for row in range(n_rows):
        cnt = int(next(it))
        for _ in range(cnt):
            col = int(next(it)) - 1
            memberships[col].append(row)
    weights = [1.0] * n_rows if unit_weights else [float(sum(costs)) / n_rows] * n_rows
    return coverage_instance(memberships, weights, k_sets=k_sets)
