"""Hot numeric kernels with a compiled core and a pure-Python fallback.

The compiled Cython module is preferred when importable; set
``SOLVERSTRESS_PURE=1`` to force the fallback. Both backends are
bit-identical by construction (see benchmarks/bench_kernels.py and
tests/test_kernels.py).
"""

import os

from .fallback import tmat_close  # vectorized numpy; shared by both backends

if os.environ.get("SOLVERSTRESS_PURE", "") not in ("", "0"):
    from . import fallback as _impl

    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl

        BACKEND = "compiled"
    except ImportError:  # extension not built; degrade silently
        from . import fallback as _impl

        BACKEND = "pure"

dag_schedule = _impl.dag_schedule
atsp_tour_cost = _impl.atsp_tour_cost
atsp_nearest_neighbour = _impl.atsp_nearest_neighbour
atsp_furthest_insertion = _impl.atsp_furthest_insertion
atsp_brute_force = _impl.atsp_brute_force
coverage_stats = _impl.coverage_stats
mc_greedy = _impl.mc_greedy
mcscc_local = _impl.mcscc_local
mcscc_greedy_average = _impl.mcscc_greedy_average

__all__ = [
    "BACKEND",
    "dag_schedule",
    "atsp_tour_cost",
    "atsp_nearest_neighbour",
    "atsp_furthest_insertion",
    "atsp_brute_force",
    "coverage_stats",
    "mc_greedy",
    "mcscc_local",
    "mcscc_greedy_average",
    "tmat_close",
]
