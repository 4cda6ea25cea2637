"""Dataset generation, calibration, experiment orchestration, and the
attack-MDP bridge."""

from . import bridge, calibrate, datasets, experiment

__all__ = ["bridge", "calibrate", "datasets", "experiment"]
