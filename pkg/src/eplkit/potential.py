from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .linalg import SymEig, powered_eigenvalues


@dataclass(frozen=True)
class PotentialSpec:
    """A decomposed positive definite matrix M together with an exponent p > 0."""

    source: SymEig
    exponent: float

    def __post_init__(self) -> None:
        if not self.exponent > 0:
            raise ValueError(f"Exponent must be positive, got {self.exponent}")
        if self.source.dim and float(self.source.eigenvalues[-1]) <= 0:
            raise ValueError("Potential source must be positive definite")


def phi(spec: PotentialSpec, u: ArrayLike) -> float:
    """½ uᵀ M^p u."""
    coords = spec.source.rotate(u)
    scaled = powered_eigenvalues(spec.source, spec.exponent)
    return 0.5 * float(np.sum(scaled * coords * coords))


def weighted_norm_sq(spec: PotentialSpec, u: ArrayLike) -> float:
    """uᵀ M^{-p} u, evaluated in the eigenbasis."""
    coords = spec.source.rotate(u)
    scaled = powered_eigenvalues(spec.source, -spec.exponent)
    return float(np.sum(scaled * coords * coords))


def weighted_norm(spec: PotentialSpec, u: ArrayLike) -> float:
    return math.sqrt(weighted_norm_sq(spec, u))


def primal_norm(spec: PotentialSpec, u: ArrayLike) -> float:
    """‖u‖_{M^p} = √(2·phi)."""
    return math.sqrt(2.0 * phi(spec, u))


def dual_phi(spec: PotentialSpec, u: ArrayLike) -> float:
    # Written as ½‖u‖_{M^{-p}}, not the squared Fenchel form.
    return 0.5 * weighted_norm(spec, u)
