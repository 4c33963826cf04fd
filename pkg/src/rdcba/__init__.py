"""Rate-distortion and distortion-rate functions of discrete sources.

The main entry points are :func:`solve_rd` and :func:`solve_dr`, which run the
constrained Blahut-Arimoto iteration at a prescribed distortion or rate, and
:func:`sweep_rd_curve` for whole curves. :mod:`rdcba.ba` holds the fixed-slope
baseline and :mod:`rdcba.oracle` independent reference values.
"""

from .ba import BaConfig, BaReport, ba_fixed_lambda, ba_search_dr, ba_search_rd
from .cba import CurvePoint, IterationTrace, SolveReport, StopCriterion, StopReason, solve_dr, solve_rd, sweep_rd_curve
from .errors import *  # noqa: F401,F403
from .model import (
    FeasibilityRange,
    ProblemInstance,
    TargetClass,
    classify_target_distortion,
    feasibility_range,
    load_instance,
    make_instance,
    save_instance,
    validate_instance,
)
from .rootfind import RootConfig
from .sources import (
    berger_bifurcation,
    binary_hamming,
    gaussian_instance,
    laplacian_instance,
    uniform_instance,
)

__version__ = "0.1.0"
