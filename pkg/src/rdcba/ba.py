"""Classical Blahut-Arimoto at a fixed slope, plus an outer slope search.

The fixed-slope iteration minimizes the Lagrangian ``f_R + lam * E[d]`` and
lands on the tangent point of the curve with slope ``-lam``. To hit a target
distortion the slope has to be searched for; :func:`ba_search_rd` does this
by bisection, using that the tangent distortion is non-increasing in ``lam``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from .cba import StopCriterion
from .errors import InfeasibleTarget, MaxOuterTrials, NoConvergenceOnSegment, NonPositiveRate
from .kernels import KernelWorkspace, objective_distortion, objective_rate, tilted_rate, update_r, update_w
from .model import ProblemInstance, TargetClass, classify_target_distortion, feasibility_range


class TangentPoint(NamedTuple):
    w: np.ndarray
    r: np.ndarray
    rate: float
    distortion: float
    iterations: int
    lagrangian: List[float]


@dataclass(frozen=True)
class BaConfig:
    inner_stop: StopCriterion = StopCriterion()
    outer_tolerance: float = 1e-6
    max_outer_trials: int = 100

    def __post_init__(self):
        if not self.outer_tolerance > 0:
            raise ValueError("outer_tolerance must be positive")
        if self.max_outer_trials < 1:
            raise ValueError("max_outer_trials must be at least 1")


@dataclass
class BaReport:
    target: float
    rate: float
    distortion: float
    lam: float
    outer_trials: int
    last_inner_iterations: int
    total_inner_iterations: int
    wall_time: float = 0.0
    trials: List[tuple] = field(default_factory=list, repr=False)  # (lam, distortion, rate)


def ba_fixed_lambda(
    inst: ProblemInstance,
    lam: float,
    stop: StopCriterion = StopCriterion(),
    r0: Optional[np.ndarray] = None,
    record: bool = False,
) -> TangentPoint:
    """Alternate ``w <- update_w(r, lam)``, ``r <- update_r(w)`` from a uniform marginal.

    Stops once the Lagrangian decreases by less than the tolerance.
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    ws = KernelWorkspace.for_instance(inst)
    r = np.full(inst.N, 1.0 / inst.N) if r0 is None else np.asarray(r0, dtype=np.float64)
    prev = np.inf
    history = []
    n = 0
    for n in range(1, stop.max_iterations + 1):
        w = update_w(inst, r, lam, ws)
        r = update_r(inst, w)
        value = tilted_rate(inst, ws, w, r) + lam * objective_distortion(inst, w)
        if record:
            history.append(value)
        if prev - value < stop.objective_decrease_tol:
            break
        prev = value
    return TangentPoint(w, r, objective_rate(inst, w, r), objective_distortion(inst, w), n, history)


def _zero_rate_report(target, d_max):
    return BaReport(target, 0.0, d_max, 0.0, 0, 0, 0)


def ba_search_rd(inst: ProblemInstance, D: float, cfg: BaConfig = BaConfig()) -> BaReport:
    """Find the slope whose tangent point has distortion ``D`` (within ``outer_tolerance``).

    Raises ``NoConvergenceOnSegment`` when the slope bracket shrinks to
    machine precision while the tangent distortions on either side still
    straddle ``D``: the target sits on a straight piece of the curve that no
    single slope resolves. Raises ``MaxOuterTrials`` when the trial budget runs out.
    """
    rng = feasibility_range(inst)
    cls = classify_target_distortion(rng, D)
    if cls is TargetClass.INFEASIBLE:
        raise InfeasibleTarget(f"D={D} is below the minimum distortion {rng.d_min}")
    if cls is TargetClass.ZERO_RATE:
        return _zero_rate_report(D, rng.d_max)
    return _bisect_slope(inst, D, cfg, key=lambda tp: tp.distortion, increasing=False)


def ba_search_dr(inst: ProblemInstance, R: float, cfg: BaConfig = BaConfig()) -> BaReport:
    """Slope search for a target rate; the tangent rate is non-decreasing in ``lam``."""
    if not R > 0:
        raise NonPositiveRate(f"target rate must be positive, got {R}")
    return _bisect_slope(inst, R, cfg, key=lambda tp: tp.rate, increasing=True)


def _bisect_slope(inst, target, cfg, key, increasing):
    t0 = time.perf_counter()
    trials = []
    total = 0

    def trial(lam):
        nonlocal total
        if len(trials) >= cfg.max_outer_trials:
            raise MaxOuterTrials(
                f"slope search used {len(trials)} trials without reaching {target} "
                f"within {cfg.outer_tolerance:g}"
            )
        tp = ba_fixed_lambda(inst, lam, cfg.inner_stop)
        total += tp.iterations
        trials.append((lam, tp.distortion, tp.rate))
        return tp

    def report(lam, tp):
        return BaReport(target, tp.rate, tp.distortion, lam, len(trials), tp.iterations, total,
                        time.perf_counter() - t0, trials)

    # "below" means the slope must grow to reach the target
    def below(tp):
        return key(tp) < target if increasing else key(tp) > target

    lo, hi = 0.0, 1.0
    tp_lo = tp_hi = None
    while True:
        tp = trial(hi)
        if abs(key(tp) - target) <= cfg.outer_tolerance:
            return report(hi, tp)
        if not below(tp):
            tp_hi = tp
            break
        lo, tp_lo = hi, tp
        hi *= 2.0

    while True:
        if hi - lo <= 1e-13 * max(1.0, hi):
            v_lo = key(tp_lo) if tp_lo is not None else float("nan")
            raise NoConvergenceOnSegment(
                f"slope bracket [{lo:.15g}, {hi:.15g}] collapsed while tangent values "
                f"{v_lo:.6g} and {key(tp_hi):.6g} straddle the target {target}; "
                "the target lies on a linear segment",
                lam=0.5 * (lo + hi), distortion_low=v_lo, distortion_high=key(tp_hi), trials=len(trials),
            )
        mid = 0.5 * (lo + hi)
        tp = trial(mid)
        if abs(key(tp) - target) <= cfg.outer_tolerance:
            return report(mid, tp)
        if below(tp):
            lo, tp_lo = mid, tp
        else:
            hi, tp_hi = mid, tp
