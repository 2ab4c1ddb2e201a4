from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .errors import NormViolationError
from .linalg import SymEig, SymMatrix, Vector, as_vector, identity, rank1_update, sym_eig
from .potential import PotentialSpec, weighted_norm

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-12
INCREMENT_TOLERANCE = 1e-10


@dataclass(frozen=True)
class StepNorms:
    norm_before: float
    norm_after: float


@dataclass(frozen=True)
class StepRecord:
    """One observed step: λ(t+1), ε²_t and the two potential norms of u_t."""

    t: int
    eigenvalues: Vector
    increments: Vector
    norm_before: float
    norm_after: float


class DesignAccumulator:
    """Running design matrix V_t = λI + Σ_{s<t} u_s u_sᵀ.

    Steps are 1-based: a fresh accumulator is at t = 1 with V_1 = λI, and each
    accepted observation advances t by one. Single owner; not thread-safe.
    """

    def __init__(self, dim: int, ridge: float, power: float = 1.0) -> None:
        if dim < 1:
            raise ValueError(f"Dimension must be at least 1, got {dim}")
        if not ridge > 0:
            raise ValueError(f"Ridge must be positive, got {ridge}")
        if not power > 0:
            raise ValueError(f"Power must be positive, got {power}")
        self.dim = dim
        self.ridge = float(ridge)
        self.power = float(power)
        self._matrix: SymMatrix = identity(dim, self.ridge)
        self._eig = sym_eig(self._matrix)
        self._decompositions: list[SymEig] = [self._eig]
        self._observations: list[Vector] = []
        self._norms: list[StepNorms] = []

    @property
    def step(self) -> int:
        return len(self._decompositions)

    @property
    def current(self) -> SymEig:
        return self._eig

    @property
    def matrix(self) -> SymMatrix:
        return self._matrix

    def potential(self, power: float | None = None, step: int | None = None) -> PotentialSpec:
        source = self._eig if step is None else self.decomposition(step)
        return PotentialSpec(source=source, exponent=self.power if power is None else power)

    def observe(self, u: ArrayLike) -> StepNorms:
        vector = np.array(as_vector(u, self.dim), copy=True)
        norm = float(np.linalg.norm(vector))
        if norm > 1.0 + NORM_TOLERANCE:
            logger.warning("Rejected observation at step %d with norm %.12g", self.step, norm)
            raise NormViolationError(norm)
        before = weighted_norm(self.potential(), vector)
        matrix = rank1_update(self._matrix, vector)
        eig = sym_eig(matrix)
        after = weighted_norm(PotentialSpec(source=eig, exponent=self.power), vector)

        vector.flags.writeable = False
        self._matrix = matrix
        self._eig = eig
        self._decompositions.append(eig)
        self._observations.append(vector)
        norms = StepNorms(norm_before=before, norm_after=after)
        self._norms.append(norms)
        return norms

    def decomposition(self, step: int) -> SymEig:
        """SymEig of V_step for 1 <= step <= current step."""
        if not 1 <= step <= self.step:
            raise IndexError(f"Step {step} out of range 1..{self.step}")
        return self._decompositions[step - 1]

    def eigenvalues(self, step: int) -> Vector:
        return self.decomposition(step).eigenvalues

    def observation(self, t: int) -> Vector:
        if not 1 <= t < self.step:
            raise IndexError(f"Observation {t} out of range 1..{self.step - 1}")
        return self._observations[t - 1]

    def norms(self, t: int) -> StepNorms:
        if not 1 <= t < self.step:
            raise IndexError(f"Observation {t} out of range 1..{self.step - 1}")
        return self._norms[t - 1]

    def raw_increments(self, t: int) -> Vector:
        """λ_i(t+1) - λ_i(t) without clamping."""
        if not 1 <= t < self.step:
            raise IndexError(f"Step {t} out of range 1..{self.step - 1}")
        return self.eigenvalues(t + 1) - self.eigenvalues(t)

    def eigenvalue_increments(self, t: int) -> Vector:
        """ε²_{i,t}, with roundoff negatives reported as zero."""
        raw = self.raw_increments(t)
        floor = -INCREMENT_TOLERANCE * float(self.eigenvalues(t + 1)[0])
        return np.where((raw < 0) & (raw >= floor), 0.0, raw)

    def eigenvalue_history(self) -> tuple[Vector, ...]:
        return tuple(eig.eigenvalues for eig in self._decompositions)

    def observations(self) -> tuple[Vector, ...]:
        return tuple(self._observations)

    def rebuild_matrix(self) -> SymMatrix:
        matrix = identity(self.dim, self.ridge)
        for vector in self._observations:
            matrix = rank1_update(matrix, vector)
        return matrix

    def records(self) -> list[StepRecord]:
        return [
            StepRecord(
                t=t,
                eigenvalues=self.eigenvalues(t + 1),
                increments=self.eigenvalue_increments(t),
                norm_before=self._norms[t - 1].norm_before,
                norm_after=self._norms[t - 1].norm_after,
            )
            for t in range(1, self.step)
        ]


def new_accumulator(dim: int, ridge: float, power: float = 1.0) -> DesignAccumulator:
    return DesignAccumulator(dim, ridge, power)


def observe(acc: DesignAccumulator, u: ArrayLike) -> StepNorms:
    return acc.observe(u)


def eigenvalue_increments(acc: DesignAccumulator, t: int) -> Vector:
    return acc.eigenvalue_increments(t)
