"""Independent reference values for checking the solvers.

Closed forms for the binary/Hamming and Gaussian/squared-error cases, and an
exhaustive search over quantized conditionals for very small alphabets.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import OutOfRange, TooLarge
from .model import ProblemInstance, feasibility_range

MAX_ALPHABET = 3
MAX_RESOLUTION = 200
MAX_COMBINATIONS = 5e8
# absorbs rounding in E[d] for grid points that meet D exactly
GRID_SLACK = 1e-12


class OracleMethod(enum.Enum):
    ANALYTIC_BINARY = "AnalyticBinary"
    ANALYTIC_GAUSSIAN_SLB = "AnalyticGaussianSLB"
    GRID_SEARCH = "GridSearch"


@dataclass(frozen=True)
class OracleResult:
    rate: float
    distortion: float
    method: OracleMethod


def binary_entropy(q: float) -> float:
    """Binary entropy in nats."""
    return float(-xlogy(q, q) - xlogy(1.0 - q, 1.0 - q))


def analytic_binary_rd(p: float, D: float) -> float:
    """R(D) = H_b(p) - H_b(D) for a Bernoulli(p) source under Hamming distortion, in nats.

    Zero for D >= min(p, 1 - p).
    """
    if not 0.0 < p < 1.0:
        raise OutOfRange(f"p={p} must lie in (0, 1)")
    if D < 0:
        raise OutOfRange(f"D={D} must be nonnegative")
    if D >= min(p, 1.0 - p):
        return 0.0
    return binary_entropy(p) - binary_entropy(D)


def analytic_gaussian_rd(sigma: float, D: float) -> float:
    """R(D) = 1/2 ln(sigma^2 / D) for a Gaussian source under squared error."""
    if not sigma > 0:
        raise OutOfRange(f"sigma={sigma} must be positive")
    if not D > 0:
        raise OutOfRange(f"D={D} must be positive")
    return max(0.0, 0.5 * math.log(sigma * sigma / D))


def simplex_grid(n: int, resolution: int) -> np.ndarray:
    """All points of the (n-1)-simplex with coordinates in multiples of 1/resolution."""
    pts = [
        c + (resolution - sum(c),)
        for c in itertools.product(range(resolution + 1), repeat=n - 1)
        if sum(c) <= resolution
    ]
    return np.array(pts, dtype=np.float64) / resolution


def grid_search_rd(
    inst: ProblemInstance, D: float, resolution: int = 100, slack: float = GRID_SLACK
) -> OracleResult:
    """Minimum mutual information over conditionals whose rows lie on a simplex grid.

    Rows are enumerated jointly; the marginal is taken as ``p @ w`` (the
    optimal choice for fixed ``w``), so only ``w`` is searched. Candidates
    must satisfy ``E[d] <= D + slack``, the slack only absorbing rounding in
    the grid arithmetic. Every candidate is feasible, so the result is an
    upper bound on R(D) that tightens as the grid is refined.
    """
    M, N = inst.d.shape
    if M > MAX_ALPHABET or N > MAX_ALPHABET or resolution > MAX_RESOLUTION or resolution < 1:
        raise TooLarge(f"grid search limited to M, N <= {MAX_ALPHABET} and resolution <= {MAX_RESOLUTION}")
    G = math.comb(resolution + N - 1, N - 1)
    if float(G) ** M > MAX_COMBINATIONS:
        raise TooLarge(f"{G}^{M} candidate conditionals exceed the search budget")
    d_max = feasibility_range(inst).d_max
    if D >= d_max:
        return OracleResult(0.0, d_max, OracleMethod.GRID_SEARCH)

    grid = simplex_grid(N, resolution)
    neg_ent = xlogy(grid, grid).sum(axis=1)  # per grid point: sum_j w_j log w_j
    p = inst.p
    row_dist = [grid @ inst.d[i] for i in range(M)]  # per row, per grid point
    budget = D + slack

    best_rate, best_dist = math.inf, math.nan
    chunk = max(1, int(2_000_000 // G))
    # fix all rows except the last two in Python, vectorize the last two
    head_rows = M - 2 if M >= 2 else 0
    for head in itertools.product(range(G), repeat=head_rows):
        base_r = np.zeros(N)
        base_f = 0.0
        base_d = 0.0
        for i, g in enumerate(head):
            base_r += p[i] * grid[g]
            base_f += p[i] * neg_ent[g]
            base_d += p[i] * row_dist[i][g]
        if M == 1:
            r = base_r + p[0] * grid
            dist = base_d + p[0] * row_dist[0]
            rate = base_f + p[0] * neg_ent - xlogy(r, r).sum(axis=1)
            ok = dist <= budget
            if ok.any():
                k = int(np.argmin(np.where(ok, rate, np.inf)))
                if rate[k] < best_rate:
                    best_rate, best_dist = float(rate[k]), float(dist[k])
            continue
        a, b = M - 2, M - 1
        for start in range(0, G, chunk):
            sl = slice(start, min(G, start + chunk))
            r = base_r + p[a] * grid[sl, None, :] + p[b] * grid[None, :, :]
            dist = base_d + p[a] * row_dist[a][sl, None] + p[b] * row_dist[b][None, :]
            ok = dist <= budget
            if not ok.any():
                continue
            rate = base_f + p[a] * neg_ent[sl, None] + p[b] * neg_ent[None, :] - xlogy(r, r).sum(axis=2)
            rate = np.where(ok, rate, np.inf)
            k = np.unravel_index(int(np.argmin(rate)), rate.shape)
            if rate[k] < best_rate:
                best_rate, best_dist = float(rate[k]), float(dist[k])
    return OracleResult(max(best_rate, 0.0) if math.isfinite(best_rate) else best_rate,
                        best_dist, OracleMethod.GRID_SEARCH)
