"""Problem instances, simplex checks and the feasible distortion range."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import NegativeDistortion, NegativeProbability, NonStochastic, ShapeMismatch

# |sum(p) - 1| below this is renormalized silently, above it is an error
RENORMALIZE_TOL = 1e-9
ROW_SUM_TOL = 1e-10


@dataclass(frozen=True)
class ProblemInstance:
    """Discrete memoryless source ``p`` with distortion matrix ``d`` (M x N).

    Construct through :func:`make_instance` (or :func:`validate_instance`) to get
    the invariants checked; the arrays are marked read-only afterwards.
    """

    p: np.ndarray
    d: np.ndarray
    source_labels: Optional[np.ndarray] = None
    repro_labels: Optional[np.ndarray] = None
    name: str = "custom"

    @property
    def M(self) -> int:
        return self.d.shape[0]

    @property
    def N(self) -> int:
        return self.d.shape[1]

    def to_dict(self) -> dict:
        out = {"p": self.p.tolist(), "d": self.d.tolist()}
        if self.source_labels is not None:
            out["source_labels"] = self.source_labels.tolist()
        if self.repro_labels is not None:
            out["repro_labels"] = self.repro_labels.tolist()
        return out


@dataclass(frozen=True)
class FeasibilityRange:
    d_min: float
    d_max: float


class TargetClass(enum.Enum):
    INFEASIBLE = "Infeasible"
    INTERIOR = "Interior"
    ZERO_RATE = "ZeroRate"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


def validate_instance(inst: ProblemInstance) -> ProblemInstance:
    """Check every instance invariant; returns a (possibly renormalized) copy.

    Raises ``ShapeMismatch``, ``NegativeProbability``, ``NonStochastic`` or
    ``NegativeDistortion``.
    """
    p = np.asarray(inst.p, dtype=np.float64)
    d = np.asarray(inst.d, dtype=np.float64)
    if p.ndim != 1 or p.size < 1:
        raise ShapeMismatch(f"p must be a non-empty vector, got shape {p.shape}")
    if d.ndim != 2 or d.shape[0] != p.size or d.shape[1] < 1:
        raise ShapeMismatch(f"d must have shape ({p.size}, N>=1), got {d.shape}")
    if not np.all(np.isfinite(p)):
        raise NonStochastic("p contains non-finite entries")
    if np.any(p < 0):
        raise NegativeProbability(f"p has negative entry {p.min():g}")
    total = p.sum()
    if abs(total - 1.0) > RENORMALIZE_TOL:
        raise NonStochastic(f"p sums to {total!r}")
    if not np.all(np.isfinite(d)):
        raise NegativeDistortion("d contains non-finite entries")
    if np.any(d < 0):
        raise NegativeDistortion(f"d has negative entry {d.min():g}")

    src = inst.source_labels
    rep = inst.repro_labels
    if src is not None:
        src = np.asarray(src, dtype=np.float64)
        if src.shape != (p.size,):
            raise ShapeMismatch(f"source_labels must have length {p.size}")
    if rep is not None:
        rep = np.asarray(rep, dtype=np.float64)
        if rep.shape != (d.shape[1],):
            raise ShapeMismatch(f"repro_labels must have length {d.shape[1]}")

    if total != 1.0:
        p = p / total
    return ProblemInstance(
        p=_frozen(p),
        d=_frozen(d),
        source_labels=None if src is None else _frozen(src),
        repro_labels=None if rep is None else _frozen(rep),
        name=inst.name,
    )


def make_instance(
    p: Sequence[float],
    d: Sequence[Sequence[float]],
    source_labels: Optional[Sequence[float]] = None,
    repro_labels: Optional[Sequence[float]] = None,
    name: str = "custom",
) -> ProblemInstance:
    return validate_instance(ProblemInstance(p, d, source_labels, repro_labels, name))


def feasibility_range(inst: ProblemInstance) -> FeasibilityRange:
    """``d_min = min_ij d_ij`` and ``d_max = min_j sum_i p_i d_ij``."""
    d_min = float(inst.d.min())
    d_max = float((inst.p @ inst.d).min())
    return FeasibilityRange(d_min, max(d_max, d_min))


def classify_target_distortion(rng: FeasibilityRange, D: float) -> TargetClass:
    if D < rng.d_min:
        return TargetClass.INFEASIBLE
    if D >= rng.d_max:
        return TargetClass.ZERO_RATE
    return TargetClass.INTERIOR


def check_reproduction(r: np.ndarray, tol: float = ROW_SUM_TOL) -> np.ndarray:
    """Validate a distribution on the reproduction alphabet."""
    r = np.asarray(r, dtype=np.float64)
    if r.ndim != 1 or np.any(r < 0) or abs(r.sum() - 1.0) > tol:
        raise NonStochastic("reproduction distribution is not on the simplex")
    return r


def check_conditional(w: np.ndarray, shape=None, tol: float = ROW_SUM_TOL) -> np.ndarray:
    """Validate a row-stochastic conditional matrix."""
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or (shape is not None and w.shape != tuple(shape)):
        raise ShapeMismatch(f"conditional has shape {w.shape}, expected {shape}")
    if np.any(w < 0):
        raise NegativeProbability("conditional has negative entries")
    if np.any(np.abs(w.sum(axis=1) - 1.0) > tol):
        raise NonStochastic("conditional rows do not sum to one")
    return w


def instance_from_dict(doc: dict, name: str = "custom") -> ProblemInstance:
    try:
        p, d = doc["p"], doc["d"]
    except KeyError as exc:
        raise ShapeMismatch(f"instance document is missing key {exc}") from None
    try:
        d = np.array(d, dtype=np.float64)
    except ValueError:
        raise ShapeMismatch("d must be a rectangular matrix") from None
    return make_instance(p, d, doc.get("source_labels"), doc.get("repro_labels"), name)


def load_instance(path) -> ProblemInstance:
    path = Path(path)
    with path.open() as fh:
        doc = json.load(fh)
    return instance_from_dict(doc, name=path.stem)


def save_instance(inst: ProblemInstance, path) -> None:
    with Path(path).open("w") as fh:
        json.dump(inst.to_dict(), fh, indent=1)
