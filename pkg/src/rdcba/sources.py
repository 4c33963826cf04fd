"""Canonical problem instances: discretized continuous sources and small fixed examples."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .model import ProblemInstance, make_instance

UNDERFLOW = 1e-300


@dataclass(frozen=True)
class GridSpec:
    L: float = 8.0
    K: int = 100
    N: int = 100

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("half-width L must be positive")
        if self.K < 1 or self.N < 1:
            raise ValueError("grid sizes must be at least 1")


class DistortionKind(enum.Enum):
    SQUARED = "squared"
    ABSOLUTE = "absolute"


@dataclass(frozen=True)
class Gaussian:
    sigma: float = 1.0

    def density(self, x):
        return np.exp(-0.5 * (x / self.sigma) ** 2)


@dataclass(frozen=True)
class Laplacian:
    b: float = 1.0

    def density(self, x):
        return np.exp(-np.abs(x) / self.b)


@dataclass(frozen=True)
class Uniform:
    def density(self, x):
        return np.ones_like(x)


def midpoints(L: float, n: int) -> np.ndarray:
    # built from both ends so symmetric grids are symmetric bit for bit
    step = 2.0 * L / n
    i = np.arange(n)
    left = -L + (i + 0.5) * step
    right = L - (n - 1 - i + 0.5) * step
    return np.where(i < n / 2, left, right)


def make_grid(spec: GridSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Cell midpoints ``x_i = -L + (i - 1/2) 2L/K`` and the same for the reproduction grid."""
    return midpoints(spec.L, spec.K), midpoints(spec.L, spec.N)


def distortion_matrix(x: np.ndarray, y: np.ndarray, kind: DistortionKind) -> np.ndarray:
    diff = x[:, None] - y[None, :]
    if kind is DistortionKind.SQUARED:
        return diff * diff
    return np.abs(diff)


def discretize_density(density, spec: GridSpec, kind: DistortionKind) -> ProblemInstance:
    """Evaluate the density at grid midpoints and renormalize over the grid."""
    if isinstance(density, Gaussian) and not density.sigma > 0:
        raise ValueError("sigma must be positive")
    if isinstance(density, Laplacian) and not density.b > 0:
        raise ValueError("b must be positive")
    x, y = make_grid(spec)
    f = density.density(x)
    f = np.where(f < UNDERFLOW, 0.0, f)
    p = f / f.sum()
    name = f"{type(density).__name__.lower()}-K{spec.K}-N{spec.N}-L{spec.L:g}-{kind.value}"
    return make_instance(p, distortion_matrix(x, y, kind), x, y, name=name)


def gaussian_instance(sigma=1.0, L=8.0, K=100, N=None) -> ProblemInstance:
    return discretize_density(Gaussian(sigma), GridSpec(L, K, K if N is None else N), DistortionKind.SQUARED)


def laplacian_instance(b=1.0, L=8.0, K=100, N=None) -> ProblemInstance:
    return discretize_density(Laplacian(b), GridSpec(L, K, K if N is None else N), DistortionKind.ABSOLUTE)


def uniform_instance(L=8.0, K=20, N=None) -> ProblemInstance:
    return discretize_density(Uniform(), GridSpec(L, K, K if N is None else N), DistortionKind.SQUARED)


def binary_hamming(p: float = 0.5) -> ProblemInstance:
    if not 0 < p < 1:
        raise ValueError("p must lie strictly between 0 and 1")
    return make_instance([p, 1.0 - p], [[0.0, 1.0], [1.0, 0.0]], name=f"binary-{p:g}")


def berger_bifurcation() -> ProblemInstance:
    """Two-letter source with a three-letter reproduction whose R(D) has a linear segment."""
    return make_instance([0.4, 0.6], [[1.0, 0.0, 0.3], [0.0, 1.0, 0.3]], name="berger")


def canonical_instance(name: str, p: float = 0.5) -> ProblemInstance:
    if name == "binary":
        return binary_hamming(p)
    if name == "berger":
        return berger_bifurcation()
    raise ValueError(f"unknown canonical instance {name!r}")
