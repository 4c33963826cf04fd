"""Stable evaluation of the exponential-tilting kernel shared by both solvers.

For a multiplier ``lam`` and reproduction ``r`` the tilted conditional is

    w_ij = r_j exp(-lam d_ij) / Z_i,    Z_i = sum_j r_j exp(-lam d_ij).

Everything is evaluated row-wise in a shifted log domain so that the largest
term of each row is exactly 1. The shift cancels in every ratio and is added
back wherever ``log Z_i`` itself is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import DegenerateRow, SupportViolation
from .model import ProblemInstance


@dataclass
class KernelWorkspace:
    """Scratch buffers for one instance; owned by a single caller at a time."""

    row_min_d: np.ndarray  # min_j d_ij
    shifted_d: np.ndarray  # d_ij - min_j d_ij, all >= 0
    scratch: np.ndarray  # shifted kernel terms, row max == 1
    log_scratch: np.ndarray  # log of scratch (-inf where r_j == 0)
    row_sums: np.ndarray  # shifted partition sums, >= 1 on live rows
    row_log_shift: np.ndarray  # log Z_i = log(row_sums_i) + row_log_shift_i - lam * row_min_d_i
    row_mean_d: np.ndarray
    row_mean_d2: np.ndarray
    row_var_d: np.ndarray  # Var_i[d] under the tilted row distribution
    lam: Optional[float] = None
    _r: Optional[np.ndarray] = field(default=None, repr=False)
    _live: Optional[np.ndarray] = field(default=None, repr=False)
    _shifted_mean: Optional[np.ndarray] = field(default=None, repr=False)
    _dev: Optional[np.ndarray] = field(default=None, repr=False)
    _r_has_zero: bool = field(default=False, repr=False)

    @classmethod
    def for_instance(cls, inst: ProblemInstance) -> "KernelWorkspace":
        M, N = inst.d.shape
        row_min = inst.d.min(axis=1)
        return cls(
            row_min_d=row_min,
            shifted_d=inst.d - row_min[:, None],
            scratch=np.empty((M, N)),
            log_scratch=np.empty((M, N)),
            row_sums=np.empty(M),
            row_log_shift=np.empty(M),
            row_mean_d=np.empty(M),
            row_mean_d2=np.empty(M),
            row_var_d=np.empty(M),
            _live=inst.p > 0,
            _dev=np.empty((M, N)),
        )

    def fill(self, r: np.ndarray, lam: float) -> None:
        """Evaluate all per-row kernel quantities at ``(r, lam)``; cached on identity of ``r``."""
        if self._r is r and self.lam == lam:
            return
        s = self.shifted_d
        self._r_has_zero = bool(r.min() <= 0)
        with np.errstate(divide="ignore"):
            log_r = np.log(r)
        logs = self.log_scratch
        np.multiply(s, -lam, out=logs)
        logs += log_r
        shift = logs.max(axis=1)
        bad = ~np.isfinite(shift)
        if bad.any():
            if np.any(bad & self._live):
                raise DegenerateRow(f"rows {np.flatnonzero(bad & self._live).tolist()} have no reachable mass")
            # zero-probability rows never contribute; give them a harmless shift
            shift = np.where(bad, 0.0, shift)
        logs -= shift[:, None]
        expo = self.scratch
        np.exp(logs, out=expo)
        Z = expo.sum(axis=1)
        if bad.any():
            expo[bad] = r
            Z[bad] = 1.0
        self.row_sums[:] = Z
        self.row_log_shift[:] = shift
        # moments of the shifted distortion; two-pass variance avoids cancellation
        m1 = np.einsum("ij,ij->i", expo, s) / Z
        dev = np.subtract(s, m1[:, None], out=self._dev)
        np.square(dev, out=dev)
        var = np.einsum("ij,ij->i", expo, dev) / Z
        self.row_mean_d[:] = m1 + self.row_min_d
        self.row_var_d[:] = var
        self.row_mean_d2[:] = var + self.row_mean_d**2
        self._shifted_mean = m1
        self.lam = lam
        self._r = r


def _workspace(inst, ws):
    return ws if ws is not None else KernelWorkspace.for_instance(inst)


def eval_G_R(
    inst: ProblemInstance, r: np.ndarray, lam: float, D: float, ws: Optional[KernelWorkspace] = None
) -> Tuple[float, float]:
    """Value and derivative of ``G_R(lam) = sum_i p_i E_i[d] - D``.

    The derivative is ``-sum_i p_i Var_i[d]`` and is never positive.
    """
    ws = _workspace(inst, ws)
    ws.fill(r, lam)
    value = float(inst.p @ ws.row_mean_d) - D
    deriv = -float(inst.p @ ws.row_var_d)
    return value, deriv


def eval_G_D(
    inst: ProblemInstance, r: np.ndarray, lam: float, R: float, ws: Optional[KernelWorkspace] = None
) -> Tuple[float, float]:
    """Value and derivative of
    ``G_D(lam) = -sum_i p_i log Z_i - lam sum_i p_i E_i[d] - R``.

    The row shift cancels between the two terms, so only the shifted
    quantities appear. Derivative is ``lam sum_i p_i Var_i[d] >= 0``.
    """
    ws = _workspace(inst, ws)
    ws.fill(r, lam)
    p = inst.p
    live = p > 0
    log_z_shifted = np.log(ws.row_sums[live]) + ws.row_log_shift[live]
    value = -float(p[live] @ log_z_shifted) - lam * float(p[live] @ ws._shifted_mean[live]) - R
    deriv = lam * float(p @ ws.row_var_d)
    return value, deriv


def update_w(
    inst: ProblemInstance, r: np.ndarray, lam: float, ws: Optional[KernelWorkspace] = None
) -> np.ndarray:
    """Closed-form conditional ``w_ij ∝ r_j exp(-lam d_ij)``, rows renormalized."""
    ws = _workspace(inst, ws)
    ws.fill(r, lam)
    w = ws.scratch / ws.row_sums[:, None]
    w /= w.sum(axis=1, keepdims=True)
    return w


def tilted_rate(inst: ProblemInstance, ws: KernelWorkspace, w: np.ndarray, r_next: np.ndarray) -> float:
    """Mutual information of ``w`` (the conditional last built in ``ws``) against ``r_next = p @ w``.

    Equals ``objective_rate(inst, w, r_next)`` up to rounding but reuses the
    kernel's log terms instead of taking M*N fresh logarithms.
    """
    logs = ws.log_scratch
    if ws._r_has_zero:
        logs = np.where(w > 0, logs, 0.0)
    neg_entropy = np.einsum("ij,ij->i", w, logs) - np.log(ws.row_sums)
    pos = r_next > 0
    live = ws._live
    return float(inst.p[live] @ neg_entropy[live] - r_next[pos] @ np.log(r_next[pos]))


def update_r(inst: ProblemInstance, w: np.ndarray) -> np.ndarray:
    """Output marginal ``r_j = sum_i p_i w_ij``."""
    r = inst.p @ w
    return r / r.sum()


def objective_rate(inst: ProblemInstance, w: np.ndarray, r: np.ndarray) -> float:
    """``sum_ij p_i w_ij (log w_ij - log r_j)`` in nats, with 0 log 0 = 0."""
    joint = inst.p[:, None] * w
    # judged on the joint mass: p_i w_ij may underflow where w_ij alone does not
    pos = joint > 0
    if np.any(pos & (r[None, :] <= 0)):
        raise SupportViolation("conditional mass on a reproduction letter with r_j = 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(pos, joint * (np.log(w) - np.log(r)[None, :]), 0.0)
    return float(terms.sum(axis=1).sum())


def objective_distortion(inst: ProblemInstance, w: np.ndarray) -> float:
    """Expected distortion ``sum_ij p_i w_ij d_ij``."""
    return float(inst.p @ np.einsum("ij,ij->i", w, inst.d))


def kl_divergence(a: np.ndarray, b: np.ndarray) -> float:
    """``D_KL(a || b)`` in nats; infinite when ``a`` is not absolutely continuous wrt ``b``."""
    pos = a > 0
    if np.any(b[pos] <= 0):
        return float("inf")
    return float(np.sum(a[pos] * (np.log(a[pos]) - np.log(b[pos]))))
