"""Robustness stress-testing for combinatorial-optimization solvers.

Perturbs problem instances through edge modifications that provably never
worsen the true optimum (loosened constraints or lowered costs), then
searches for perturbations that degrade a black-box solver's output.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .core import (
    AttackAction,
    Color,
    GraphInstance,
    Kind,
    NodeAttr,
    Op,
    ProblemInstance,
    Sense,
    Solution,
    apply_action,
    atsp_instance,
    coverage_instance,
    dag_instance,
    deserialize_instance,
    serialize_instance,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "AttackAction",
    "Color",
    "GraphInstance",
    "Kind",
    "NodeAttr",
    "Op",
    "ProblemInstance",
    "Sense",
    "Solution",
    "apply_action",
    "atsp_instance",
    "coverage_instance",
    "dag_instance",
    "deserialize_instance",
    "serialize_instance",
    "__version__",
]
