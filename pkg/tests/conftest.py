"""Shared fuzzing helpers: seeded random instances of every problem kind."""

from __future__ import annotations

import random

from solverstress.core import ProblemInstance
from solverstress.harness import datasets


def random_dag(rng: random.Random, max_jobs: int = 8) -> ProblemInstance:
    jobs = rng.randint(1, max_jobs)
    return datasets.gen_dag(rng, {
        "jobs": jobs,
        "layers": rng.randint(2, max(2, jobs)),
        "density": rng.uniform(0.2, 0.8),
        "duration_range": (1.0, 20.0),
        "resource_range": (0.1, 0.9),
    })


def random_atsp(rng: random.Random, max_cities: int = 8) -> ProblemInstance:
    return datasets.gen_atsp(rng, {
        "cities": rng.randint(2, max_cities),
        "max_weight": 50,
    })


def random_mc(rng: random.Random, max_sets: int = 6,
              max_elements: int = 10) -> ProblemInstance:
    sets = rng.randint(1, max_sets)
    return datasets.gen_mc(rng, {
        "sets": sets,
        "elements": rng.randint(1, max_elements),
        "k_sets": rng.randint(1, sets),
        "max_weight": 10,
        "membership": rng.uniform(1.0, 3.0),
    })


def random_mcscc(rng: random.Random, max_sets: int = 5) -> ProblemInstance:
    whites = rng.randint(2, 12)
    return datasets.gen_mcscc(rng, {
        "sets": rng.randint(1, max_sets),
        "blacks": rng.randint(1, 8),
        "whites": whites,
        "k_white": rng.randint(0, whites),
        "dominant_frac": 0.2,
    })


RANDOM_INSTANCE = {
    "dag": random_dag,
    "atsp": random_atsp,
    "mc": random_mc,
    "mcscc": random_mcscc,
}


def random_instance(problem: str, seed: int) -> ProblemInstance:
    return RANDOM_INSTANCE[problem](random.Random(seed))
