from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .accumulator import DesignAccumulator
from .errors import NormViolationError
from .linalg import Vector
from .potential import weighted_norm_sq

REGIME_TOLERANCE = 1e-12
CHECK_TOLERANCE = 1e-9


class BoundRegime(Enum):
    P_GT_1 = "p>1"
    P_EQ_1 = "p=1"
    P_LT_1 = "p<1"


class Convention(Enum):
    CURRENT = "current"
    NEXT = "next"


@dataclass(frozen=True)
class SandwichReport:
    sum_next: float
    sum_current: float
    ok: bool


@dataclass(frozen=True)
class IncrementReport:
    lhs: float
    rhs: float
    ok: bool


def select_regime(power: float) -> BoundRegime:
    if abs(power - 1.0) <= REGIME_TOLERANCE:
        return BoundRegime.P_EQ_1
    return BoundRegime.P_GT_1 if power > 1.0 else BoundRegime.P_LT_1


def _check_bound_args(horizon: int, dim: int, ridge: float, power: float) -> None:
    if horizon < 1:
        raise ValueError(f"Horizon must be at least 1, got {horizon}")
    if dim < 1:
        raise ValueError(f"Dimension must be at least 1, got {dim}")
    if not ridge > 0:
        raise ValueError(f"Ridge must be positive, got {ridge}")
    if not power > 0:
        raise ValueError(f"Power must be positive, got {power}")


def epl_upper_bound(horizon: int, dim: int, ridge: float, power: float) -> float:
    """Closed-form bound on Σ_t ‖u_t‖_{V_{t+1}^{-p}} for unit-bounded u_t."""
    _check_bound_args(horizon, dim, ridge, power)
    t, d, lam, p = float(horizon), float(dim), float(ridge), float(power)
    regime = select_regime(p)
    if regime is BoundRegime.P_GT_1:
        return math.sqrt(t * d / (lam ** (p - 1.0) * (p - 1.0)))
    if regime is BoundRegime.P_EQ_1:
        return math.sqrt(t * d * math.log((t + d * lam) / (d * lam)))
    return math.sqrt((d**p / (1.0 - p)) * t * (t + d * lam) ** (1.0 - p))


def epl_current_upper_bound(horizon: int, dim: int, ridge: float, power: float) -> float:
    """Bound on the V_t-convention sum, via the sandwich factor 2^{p/2}."""
    if ridge < 1:
        raise ValueError(f"Sandwich factor needs ridge >= 1, got {ridge}")
    return 2.0 ** (power / 2.0) * epl_upper_bound(horizon, dim, ridge, power)


def power_integral(lower: float, upper: float, power: float) -> float:
    """∫_lower^upper x^{-p} dx for 0 < lower <= upper."""
    if not lower > 0:
        raise ValueError(f"Integral lower limit must be positive, got {lower}")
    ratio = (upper - lower) / lower
    if select_regime(power) is BoundRegime.P_EQ_1:
        return math.log1p(ratio)
    exponent = 1.0 - power
    return lower**exponent * math.expm1(exponent * math.log1p(ratio)) / exponent


def spectral_upper_bound(acc: DesignAccumulator, power: float) -> float:
    """√(T · Σ_i ∫_λ^{λ_i(T+1)} x^{-p} dx) for the observations held by acc."""
    horizon = acc.step - 1
    if horizon < 1:
        return 0.0
    final = acc.eigenvalues(acc.step)
    total = sum(power_integral(acc.ridge, max(acc.ridge, float(v)), power) for v in final)
    return math.sqrt(horizon * total)


def as_sequence(sequence: Iterable[ArrayLike]) -> list[Vector]:
    vectors = [np.asarray(u, dtype=np.float64).reshape(-1) for u in sequence]
    if vectors and any(v.shape != vectors[0].shape for v in vectors):
        raise ValueError("All vectors in a sequence must share one dimension")
    return vectors


def run_sequence(
    sequence: Iterable[ArrayLike],
    ridge: float,
    power: float,
    dim: int | None = None,
) -> DesignAccumulator:
    vectors = as_sequence(sequence)
    if dim is None:
        dim = vectors[0].shape[0] if vectors else 1
    acc = DesignAccumulator(dim, ridge, power)
    for t, vector in enumerate(vectors, start=1):
        try:
            acc.observe(vector)
        except NormViolationError as exc:
            raise exc.at(t) from exc
    return acc


def epl_empirical_sum(
    sequence: Iterable[ArrayLike],
    ridge: float,
    power: float,
    convention: Convention = Convention.NEXT,
    dim: int | None = None,
) -> float:
    acc = run_sequence(sequence, ridge, power, dim)
    return empirical_sum(acc, convention)


def empirical_sum(acc: DesignAccumulator, convention: Convention = Convention.NEXT) -> float:
    norms = [acc.norms(t) for t in range(1, acc.step)]
    if convention is Convention.NEXT:
        return math.fsum(n.norm_after for n in norms)
    return math.fsum(n.norm_before for n in norms)


def sandwich_check(
    sequence: Iterable[ArrayLike],
    ridge: float,
    power: float,
    dim: int | None = None,
) -> SandwichReport:
    if ridge < 1:
        raise ValueError(f"Sandwich inequality needs ridge >= 1, got {ridge}")
    acc = run_sequence(sequence, ridge, power, dim)
    sum_next = empirical_sum(acc, Convention.NEXT)
    sum_current = empirical_sum(acc, Convention.CURRENT)
    factor = 2.0 ** (power / 2.0)
    slack = CHECK_TOLERANCE * max(1.0, sum_current)
    ok = sum_next <= sum_current + slack and sum_current <= factor * sum_next + slack
    return SandwichReport(sum_next=sum_next, sum_current=sum_current, ok=ok)


def increment_bound_check(acc: DesignAccumulator, t: int, power: float) -> IncrementReport:
    """‖u_t‖²_{V_{t+1}^{-p}} against Σ_i (λ_i(t+1) - λ_i(t)) / λ_i(t+1)^p."""
    u = acc.observation(t)
    lhs = weighted_norm_sq(acc.potential(power, step=t + 1), u)
    after = acc.eigenvalues(t + 1)
    rhs = float(np.sum(acc.raw_increments(t) / np.power(after, power)))
    ok = lhs <= rhs + CHECK_TOLERANCE * max(1.0, rhs)
    return IncrementReport(lhs=lhs, rhs=rhs, ok=ok)


def lower_bound_sequence(horizon: int) -> list[float]:
    if horizon < 1:
        raise ValueError(f"Horizon must be at least 1, got {horizon}")
    return [math.sqrt(1.0 / horizon)] * horizon


def lower_bound_value(horizon: int, ridge: float, power: float) -> float:
    if horizon < 1:
        raise ValueError(f"Horizon must be at least 1, got {horizon}")
    if not ridge > 0:
        raise ValueError(f"Ridge must be positive, got {ridge}")
    if not power > 1:
        raise ValueError(f"Lower bound construction needs power > 1, got {power}")
    return math.sqrt(horizon) * (ridge + 1.0) ** (-power / 2.0)


def bound_table(
    horizon: int, dim: int, ridge: float, powers: Sequence[float]
) -> list[tuple[float, BoundRegime, float]]:
    return [(p, select_regime(p), epl_upper_bound(horizon, dim, ridge, p)) for p in powers]
