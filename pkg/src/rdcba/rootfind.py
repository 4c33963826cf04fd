"""Safeguarded Newton iteration for monotone scalar functions on ``[lower, inf)``."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from .errors import BracketFailed

MAX_EXPANSIONS = 200
TINY_SLOPE = 1e-300


class Direction(enum.Enum):
    DECREASING = -1
    INCREASING = 1


class RootStatus(enum.Enum):
    CONVERGED = "Converged"
    MAX_STEPS = "MaxSteps"
    BRACKET_FAILED = "BracketFailed"


@dataclass(frozen=True)
class RootConfig:
    """Stopping and bracketing policy for :func:`solve_monotone`.

    ``initial_guess=None`` means warm start: callers pass their previous root
    (the first solve in a run starts from 1.0).
    """

    tolerance: float = 1e-12
    max_newton_steps: int = 100
    bracket_growth: float = 2.0
    initial_guess: Optional[float] = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_newton_steps < 1:
            raise ValueError("max_newton_steps must be at least 1")
        if not self.bracket_growth > 1:
            raise ValueError("bracket_growth must exceed 1")
        if self.initial_guess is not None and self.initial_guess < 0:
            raise ValueError("initial_guess must be nonnegative")


@dataclass(frozen=True)
class RootResult:
    lambda_star: float
    residual: float
    newton_steps: int
    bisection_steps: int
    status: RootStatus
    bracket: Tuple[float, float] = (float("nan"), float("nan"))
    evaluations: int = 0


def solve_monotone(
    G: Callable[[float], Tuple[float, float]],
    direction: Direction,
    cfg: RootConfig = RootConfig(),
    guess: Optional[float] = None,
    lower: float = 0.0,
) -> RootResult:
    """Find ``x >= lower`` with ``|G(x)| <= cfg.tolerance`` for monotone ``G``.

    ``G`` returns ``(value, derivative)``. Newton steps start at the guess.
    Each evaluated point tightens a bracket ``[lo, hi]`` around the root
    (monotonicity tells which side of the root it is on). While one side of
    the bracket is still unknown, unusable Newton steps are replaced by
    geometric expansion towards that side; once both sides are known they
    are replaced by bisection. Newton steps that stall are also bisected.

    Raises ``BracketFailed`` when 200 expansions find no sign change. A result
    with status ``MaxSteps`` is returned (not raised) when the step budget
    runs out or the bracket collapses to adjacent floats.
    """
    tol = cfg.tolerance
    sgn = direction.value
    growth = cfg.bracket_growth
    x = guess if guess is not None else cfg.initial_guess
    if x is None:
        x = 1.0
    x = max(float(x), lower)

    lo, hi = lower, math.inf
    lo_known = hi_known = False  # whether G has been seen on that side of the root
    newton = bisect = expansions = evals = 0
    best_x, best_v = x, math.inf

    while True:
        v, g = G(x)
        v, g = float(v), float(g)
        evals += 1
        if abs(v) < abs(best_v):
            best_x, best_v = x, v
        if abs(v) <= tol:
            return RootResult(x, v, newton, bisect, RootStatus.CONVERGED, (lo, hi), evals)
        if v * sgn < 0:  # root lies to the right of x
            lo, lo_known = x, True
        else:
            if x <= lower:
                raise BracketFailed(f"no sign change at the domain edge lambda={lower:g} (value {v:.3g})")
            hi, hi_known = x, True

        if newton + bisect >= cfg.max_newton_steps:
            break
        if hi_known and lo_known and hi - lo <= 4 * math.ulp(hi):
            break

        cand = math.nan
        if abs(g) > TINY_SLOPE:
            cand = x - v / g
        if not lo_known and math.isfinite(cand) and cand <= lower < x:
            cand = lower  # project onto the domain edge, which has not been tried yet
        usable = math.isfinite(cand) and lo <= cand < hi and abs(cand - x) >= 1e-16 * (1.0 + abs(x))
        if lo_known and cand == lo:
            usable = False
        if usable:
            newton += 1
            x = cand
        elif lo_known and hi_known:
            bisect += 1
            x = 0.5 * (lo + hi)
        else:
            expansions += 1
            if expansions > MAX_EXPANSIONS:
                raise BracketFailed(
                    f"no sign change after {MAX_EXPANSIONS} expansions "
                    f"(bracket [{lo:.3g}, {hi:.3g}], last value {v:.3g})"
                )
            if lo_known:
                x = max(lo, 1.0) * growth
            elif lo - lower > 0 or hi - lower > 1e-300 * growth:
                # shrink towards the domain edge; land on it after enough steps
                x = lower + (hi - lower) / growth
                if expansions == MAX_EXPANSIONS or x - lower < 1e-300:
                    x = lower
            else:
                x = lower
    return RootResult(best_x, best_v, newton, bisect, RootStatus.MAX_STEPS, (lo, hi), evals)
