"""Constrained Blahut-Arimoto iterations for R(D) and D(R).

Each outer iteration re-solves the multiplier so that the current
reproduction marginal meets the constraint exactly, then applies the closed
form conditional and marginal updates:

    lam  <- root of G(lam; r)          (Newton, warm started)
    w    <- r_j exp(-lam d_ij) / Z_i
    r    <- p @ w
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import BracketFailed, InfeasibleTarget, NonPositiveRate, RateDistortionError, RateTooHigh
from .kernels import (
    KernelWorkspace,
    eval_G_D,
    eval_G_R,
    kl_divergence,
    objective_distortion,
    objective_rate,
    tilted_rate,
    update_r,
    update_w,
)
from .model import ProblemInstance, TargetClass, check_reproduction, classify_target_distortion, feasibility_range
from .rootfind import Direction, RootConfig, RootStatus, solve_monotone

# G_D is only defined for lam > 0
DR_LOWER = 1e-300
# share of uniform mass blended into a warm-start marginal
WARM_MIX = 1e-3


class StopReason(enum.Enum):
    TOLERANCE_MET = "ToleranceMet"
    MAX_ITERATIONS = "MaxIterations"
    ZERO_RATE_SHORTCUT = "ZeroRateShortcut"


@dataclass(frozen=True)
class StopCriterion:
    objective_decrease_tol: float = 1e-10
    max_iterations: int = 1_000_000

    def __post_init__(self):
        if not self.objective_decrease_tol > 0:
            raise ValueError("objective_decrease_tol must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class IterationTrace:
    """Per-iteration diagnostics, recorded every ``stride`` iterations.

    ``objective`` is the tracked objective after the marginal update: the
    mutual information f(w^n, r^{n+1}) for R(D), the distortion f(w^n) for
    D(R). ``objective_pre`` is f_R(w^n, r^n), evaluated with the marginal
    that produced w^n; ``kl_r`` is D_KL(r^{n+1} || r^n).
    """

    stride: int = 1
    n: List[int] = field(default_factory=list)
    lam: List[float] = field(default_factory=list)
    objective: List[float] = field(default_factory=list)
    objective_pre: List[float] = field(default_factory=list)
    achieved: List[float] = field(default_factory=list)
    newton_steps: List[int] = field(default_factory=list)
    kl_r: List[float] = field(default_factory=list)

    def append(self, n, lam, objective, objective_pre, achieved, newton_steps, kl_r):
        self.n.append(n)
        self.lam.append(lam)
        self.objective.append(objective)
        self.objective_pre.append(objective_pre)
        self.achieved.append(achieved)
        self.newton_steps.append(newton_steps)
        self.kl_r.append(kl_r)

    def __len__(self):
        return len(self.n)

    def as_arrays(self) -> dict:
        return {k: np.asarray(getattr(self, k)) for k in
                ("n", "lam", "objective", "objective_pre", "achieved", "newton_steps", "kl_r")}


@dataclass
class SolveReport:
    target: float
    rate: float  # nats
    distortion: float
    lam: float
    iterations: int
    stop_reason: StopReason
    final_r: np.ndarray
    final_w: Optional[np.ndarray] = None
    trace: Optional[IterationTrace] = None
    wall_time: float = 0.0
    newton_steps_total: int = 0
    root_residual: float = 0.0
    root_failures: int = 0  # root solves that ended in MaxSteps


@dataclass
class CurvePoint:
    D: float
    R: float
    lam: float
    iterations: int
    distortion: float = float("nan")
    stop_reason: Optional[StopReason] = None
    newton_steps: int = 0
    warm_started: bool = False
    error: Optional[str] = None
    report: Optional[SolveReport] = field(default=None, repr=False)


def _initial_r(inst: ProblemInstance, r0) -> np.ndarray:
    if r0 is None:
        return np.full(inst.N, 1.0 / inst.N)
    r = check_reproduction(np.array(r0, dtype=np.float64))
    return r / r.sum()


def _run(inst, target, kind, stop, root_cfg, r0, record_trace, trace_stride, lam0):
    ws = KernelWorkspace.for_instance(inst)
    r = _initial_r(inst, r0)
    lam = lam0 if lam0 is not None else (root_cfg.initial_guess if root_cfg.initial_guess is not None else 1.0)
    trace = IterationTrace(stride=trace_stride) if record_trace else None
    prev = np.inf
    newton_total = 0
    root_failures = 0
    residual = 0.0
    reason = StopReason.MAX_ITERATIONS
    t0 = time.perf_counter()
    w = None
    n = 0
    if kind == "rd":
        G = lambda x: eval_G_R(inst, r, x, target, ws)  # noqa: E731
        direction, lower = Direction.DECREASING, 0.0
    else:
        G = lambda x: eval_G_D(inst, r, x, target, ws)  # noqa: E731
        direction, lower = Direction.INCREASING, DR_LOWER

    for n in range(1, stop.max_iterations + 1):
        try:
            root = solve_monotone(G, direction, root_cfg, guess=lam, lower=lower)
        except BracketFailed as exc:
            if kind == "dr":
                raise RateTooHigh(
                    f"rate {target} is not reachable by any multiplier under the current "
                    f"reproduction at iteration {n}; lower the target rate ({exc})"
                ) from exc
            raise
        lam = root.lambda_star
        residual = root.residual
        newton_total += root.newton_steps + root.bisection_steps
        if root.status is not RootStatus.CONVERGED:
            root_failures += 1
        w = update_w(inst, r, lam, ws)
        r_next = update_r(inst, w)
        if kind == "rd":
            obj = tilted_rate(inst, ws, w, r_next)
        else:
            obj = objective_distortion(inst, w)
        if trace is not None and (n - 1) % trace_stride == 0:
            pre = objective_rate(inst, w, r)
            achieved = objective_distortion(inst, w) if kind == "rd" else pre
            trace.append(n, lam, obj, pre, achieved, root.newton_steps + root.bisection_steps,
                         kl_divergence(r_next, r))
        r = r_next
        if prev - obj < stop.objective_decrease_tol:
            reason = StopReason.TOLERANCE_MET
            break
        prev = obj

    return SolveReport(
        target=target,
        rate=objective_rate(inst, w, r),
        distortion=objective_distortion(inst, w),
        lam=lam,
        iterations=n,
        stop_reason=reason,
        final_r=r,
        final_w=w,
        trace=trace,
        wall_time=time.perf_counter() - t0,
        newton_steps_total=newton_total,
        root_residual=residual,
        root_failures=root_failures,
    )


def solve_rd(
    inst: ProblemInstance,
    D: float,
    stop: StopCriterion = StopCriterion(),
    root_cfg: RootConfig = RootConfig(),
    *,
    r0: Optional[np.ndarray] = None,
    lam0: Optional[float] = None,
    record_trace: bool = False,
    trace_stride: int = 1,
) -> SolveReport:
    """Rate-distortion value R(D) by constrained Blahut-Arimoto.

    Targets at or above the zero-rate distortion return immediately with
    ``R = 0``; targets below the minimum distortion raise ``InfeasibleTarget``.
    ``r0`` overrides the uniform starting marginal (used for warm starts).
    """
    rng = feasibility_range(inst)
    cls = classify_target_distortion(rng, D)
    if cls is TargetClass.INFEASIBLE:
        raise InfeasibleTarget(f"D={D} is below the minimum distortion {rng.d_min}")
    if cls is TargetClass.ZERO_RATE:
        # all mass on the column attaining d_max; every row equals r
        j = int(np.argmin(inst.p @ inst.d))
        r = np.zeros(inst.N)
        r[j] = 1.0
        w = np.tile(r, (inst.M, 1))
        return SolveReport(
            target=D, rate=0.0, distortion=rng.d_max, lam=0.0, iterations=0,
            stop_reason=StopReason.ZERO_RATE_SHORTCUT, final_r=r, final_w=w,
            trace=IterationTrace(stride=trace_stride) if record_trace else None,
        )
    return _run(inst, float(D), "rd", stop, root_cfg, r0, record_trace, trace_stride, lam0)


def solve_dr(
    inst: ProblemInstance,
    R: float,
    stop: StopCriterion = StopCriterion(),
    root_cfg: RootConfig = RootConfig(),
    *,
    r0: Optional[np.ndarray] = None,
    lam0: Optional[float] = None,
    record_trace: bool = False,
    trace_stride: int = 1,
) -> SolveReport:
    """Distortion-rate value D(R) by constrained Blahut-Arimoto.

    Raises ``NonPositiveRate`` for ``R <= 0`` and ``RateTooHigh`` when no
    multiplier reaches ``R`` under the current reproduction marginal.
    """
    if not R > 0:
        raise NonPositiveRate(f"target rate must be positive, got {R}")
    return _run(inst, float(R), "dr", stop, root_cfg, r0, record_trace, trace_stride, lam0)


def sweep_rd_curve(
    inst: ProblemInstance,
    D_values: Sequence[float],
    stop: StopCriterion = StopCriterion(),
    root_cfg: RootConfig = RootConfig(),
    *,
    warm_start: bool = True,
    warm_mix: float = WARM_MIX,
) -> List[CurvePoint]:
    """Solve R(D) on a grid of targets, in ascending order of D.

    With ``warm_start`` each solve starts from the previous converged
    multiplier and from the previous marginal blended with a ``warm_mix``
    share of the uniform distribution; without the blend, letters whose mass
    decayed to ~0 at the previous target could never re-enter the support.
    Per-point failures are stored on the point and the sweep carries on.
    Points are returned in the order of ``D_values``.
    """
    order = np.argsort(np.asarray(D_values, dtype=np.float64), kind="stable")
    points: List[Optional[CurvePoint]] = [None] * len(order)
    prev_r = prev_lam = None
    for k in order:
        D = float(D_values[k])
        warm = warm_start and prev_r is not None
        try:
            r0 = (1.0 - warm_mix) * prev_r + warm_mix / inst.N if warm else None
            rep = solve_rd(inst, D, stop, root_cfg, r0=r0, lam0=prev_lam if warm else None)
        except RateDistortionError as exc:
            points[k] = CurvePoint(D=D, R=float("nan"), lam=float("nan"), iterations=0,
                                   warm_started=warm, error=f"{type(exc).__name__}: {exc}")
            continue
        points[k] = CurvePoint(D=D, R=rep.rate, lam=rep.lam, iterations=rep.iterations,
                               distortion=rep.distortion, stop_reason=rep.stop_reason,
                               newton_steps=rep.newton_steps_total, warm_started=warm, report=rep)
        if rep.stop_reason is not StopReason.ZERO_RATE_SHORTCUT:
            prev_r, prev_lam = rep.final_r, rep.lam
    return points
