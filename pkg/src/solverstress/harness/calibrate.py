"""Machine-speed calibration for fair time limits across hosts.

Speed is the reciprocal of the mean wall-clock time to solve one fixed
calibration instance; a solver's uniform time limit is rescaled by
speed_base / speed_now before each time-limited batch.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass

from .. import solvers
from ..core import ProblemInstance
from .datasets import gen_mc

CALIBRATION_SAMPLES = 20
_CAL_SEED = 711


@dataclass(frozen=True)
class CalibrationProfile:
    speed_base: float  # 1/seconds on the reference machine
    speed_now: float   # 1/seconds on this machine, this run
    samples: int = CALIBRATION_SAMPLES
    solver: str = "mc_greedy"

    def __post_init__(self):
        if self.speed_base <= 0 or self.speed_now <= 0:
            raise ValueError("speeds must be > 0")


def calibration_instance() -> ProblemInstance:
    """Fixed, seed-pinned coverage instance solved to measure machine speed."""
    rng = random.Random(_CAL_SEED)
    return gen_mc(rng, {"sets": 400, "elements": 800, "k_sets": 40,
                        "max_weight": 100, "membership": 8.0})


def measure_speed(samples: int = CALIBRATION_SAMPLES, solver: str = "mc_greedy") -> float:
    inst = calibration_instance()
    handle = solvers.builtin_handle(solver)
    start = time.perf_counter()
    for _ in range(samples):
        solvers.solve(handle, inst)
    mean_wall = (time.perf_counter() - start) / samples
    return 1.0 / mean_wall


def calibrate(speed_base: float | None = None,
              samples: int = CALIBRATION_SAMPLES,
              solver: str = "mc_greedy") -> CalibrationProfile:
    """Measure the current speed; without a stored base, this run is the base."""
    now = measure_speed(samples=samples, solver=solver)
    return CalibrationProfile(speed_base=speed_base if speed_base else now,
                              speed_now=now, samples=samples, solver=solver)


def scaled_limit(profile: CalibrationProfile, uniform_limit: float) -> float:
    """new limit = (speed_base / speed_now) * uniform limit."""
    return profile.speed_base / profile.speed_now * uniform_limit


def save_profile(profile: CalibrationProfile, path: str) -> None:
    with open(path, "w") as f:
        json.dump(asdict(profile), f, sort_keys=True, indent=1)
        f.write("\n")


def load_profile(path: str) -> CalibrationProfile:
    with open(path) as f:
        return CalibrationProfile(**json.load(f))
