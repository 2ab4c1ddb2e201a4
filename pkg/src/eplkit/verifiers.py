"""Checkable forms of each step in the proof of the generalized potential bound.

Every check returns a ``ProofStepReport``: the two sides of one inequality, the
slack ``rhs - lhs`` and whether the inequality held within the tolerance that
step declares.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .accumulator import DesignAccumulator
from .bounds import (
    BoundRegime,
    Convention,
    empirical_sum,
    epl_upper_bound,
    increment_bound_check,
    power_integral,
    run_sequence,
    select_regime,
)
from .potential import weighted_norm_sq

JENSEN_TOLERANCE = 1e-12
INTEGRAL_TOLERANCE = 1e-10
IDENTITY_TOLERANCE = 1e-9
CHAIN_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ProofStepReport:
    step: str
    lhs: float
    rhs: float
    slack: float
    passed: bool

    def to_dict(self) -> dict[str, object]:
        return {
            "step": self.step,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "pass": self.passed,
        }


def make_report(step: str, lhs: float, rhs: float, tolerance: float) -> ProofStepReport:
    return ProofStepReport(
        step=step,
        lhs=lhs,
        rhs=rhs,
        slack=rhs - lhs,
        passed=bool(lhs <= rhs + tolerance),
    )


def equality_report(step: str, lhs: float, rhs: float, tolerance: float) -> ProofStepReport:
    return ProofStepReport(
        step=step,
        lhs=lhs,
        rhs=rhs,
        slack=rhs - lhs,
        passed=bool(abs(lhs - rhs) <= tolerance),
    )


def _non_negative(values: ArrayLike, name: str) -> np.ndarray:
    array = np.asarray(values, dtype=np.float64).reshape(-1)
    if np.any(array < 0):
        index = int(np.argmax(array < 0))
        raise ValueError(f"{name} must be non-negative (entry {index} is {array[index]})")
    return array


def jensen_step_check(values: ArrayLike) -> ProofStepReport:
    a = _non_negative(values, "Jensen terms")
    lhs = math.fsum(a)
    rhs = math.sqrt(a.size * math.fsum(a * a))
    return make_report("jensen", lhs, rhs, JENSEN_TOLERANCE * max(1.0, rhs))


def riemann_sum(increments: ArrayLike, ridge: float, power: float) -> float:
    """Σ_t ε̃_t · f(λ + Σ_{u<=t} ε̃_u) with f(x) = x^{-p}."""
    eps = _non_negative(increments, "Increments")
    if eps.size == 0:
        return 0.0
    right = ridge + np.cumsum(eps)
    return math.fsum(eps * np.power(right, -power))


def integral_comparison_check(
    increments: ArrayLike, ridge: float, power: float
) -> ProofStepReport:
    if not ridge > 0:
        raise ValueError(f"Ridge must be positive, got {ridge}")
    if not power > 0:
        raise ValueError(f"Decreasing power family needs p > 0, got {power}")
    eps = _non_negative(increments, "Increments")
    lhs = riemann_sum(eps, ridge, power)
    rhs = power_integral(ridge, ridge + math.fsum(eps), power)
    return make_report("integral_comparison", lhs, rhs, INTEGRAL_TOLERANCE * max(1.0, rhs))


def substitution_identity_check(acc: DesignAccumulator, i: int, t: int) -> ProofStepReport:
    """λ_i(t+1) against λ + Σ_{u<=t} ε²_{i,u}; ``i`` is 0-based, ``0 <= t < step``."""
    if not 0 <= i < acc.dim:
        raise IndexError(f"Eigenvalue index {i} out of range 0..{acc.dim - 1}")
    if not 0 <= t < acc.step:
        raise IndexError(f"Step {t} out of range 0..{acc.step - 1}")
    lhs = float(acc.eigenvalues(t + 1)[i])
    rhs = acc.ridge + math.fsum(float(acc.raw_increments(u)[i]) for u in range(1, t + 1))
    return equality_report("substitution", lhs, rhs, IDENTITY_TOLERANCE * max(1.0, abs(lhs)))


def rotation_step_check(acc: DesignAccumulator, t: int, power: float) -> ProofStepReport:
    """Tr(Σ_{t+1}^{-p} Σ_t) <= Tr(Σ_{t+1}^{-p} Σ̃_t) with Σ̃_t = P_{t+1}ᵀ V_t P_{t+1}."""
    after = acc.decomposition(t + 1)
    before = acc.decomposition(t)
    weights = np.power(after.eigenvalues, -power)
    rotated = after.basis.T @ before.reconstruct() @ after.basis
    lhs = float(np.sum(weights * before.eigenvalues))
    rhs = float(np.sum(weights * np.diag(rotated)))
    return make_report("rotation_step", lhs, rhs, IDENTITY_TOLERANCE * max(1.0, abs(rhs)))


def trace_identity_check(acc: DesignAccumulator, t: int, power: float) -> ProofStepReport:
    """Tr(Σ_{t+1}^{-p}(Σ_{t+1} - Σ̃_t)) equals ‖u_t‖²_{V_{t+1}^{-p}}."""
    after = acc.decomposition(t + 1)
    before = acc.decomposition(t)
    weights = np.power(after.eigenvalues, -power)
    rotated = after.basis.T @ before.reconstruct() @ after.basis
    lhs = float(np.sum(weights * (after.eigenvalues - np.diag(rotated))))
    rhs = weighted_norm_sq(acc.potential(power, step=t + 1), acc.observation(t))
    return equality_report("trace_identity", lhs, rhs, IDENTITY_TOLERANCE * max(1.0, abs(rhs)))


def _step_terms(acc: DesignAccumulator, power: float) -> list[float]:
    return [increment_bound_check(acc, t, power).rhs for t in range(1, acc.step)]


def _substituted_terms(acc: DesignAccumulator, power: float) -> float:
    total = 0.0
    for i in range(acc.dim):
        eps = np.array([float(acc.raw_increments(t)[i]) for t in range(1, acc.step)])
        denominators = acc.ridge + np.cumsum(eps)
        total += math.fsum(eps * np.power(denominators, -power))
    return total


def _regime_value(acc: DesignAccumulator, power: float) -> float:
    final = acc.eigenvalues(acc.step)
    lam = acc.ridge
    regime = select_regime(power)
    if regime is BoundRegime.P_GT_1:
        per_axis = [lam ** (1.0 - power) / (power - 1.0)] * acc.dim
    elif regime is BoundRegime.P_EQ_1:
        per_axis = [math.log(max(lam, float(v)) / lam) for v in final]
    else:
        per_axis = [max(lam, float(v)) ** (1.0 - power) / (1.0 - power) for v in final]
    return math.fsum(per_axis)


def proof_chain_report(
    sequence: Iterable[ArrayLike],
    ridge: float,
    power: float,
    dim: int | None = None,
) -> list[ProofStepReport]:
    """One report per link, from the empirical sum up to the closed-form bound.

    Links: per-step increment bound, Jensen aggregation, integral comparison,
    regime integral value, final bound. Each link's lhs is the previous link's
    rhs evaluated along the route the proof takes.
    """
    acc = run_sequence(sequence, ridge, power, dim)
    horizon = acc.step - 1
    if horizon < 1:
        raise ValueError("Proof chain needs at least one observation")

    total = empirical_sum(acc, Convention.NEXT)
    step_terms = _step_terms(acc, power)
    root_terms = [math.sqrt(max(0.0, s)) for s in step_terms]
    rooted = math.fsum(root_terms)
    jensen = math.sqrt(horizon * math.fsum(max(0.0, s) for s in step_terms))
    substituted = math.sqrt(horizon * max(0.0, _substituted_terms(acc, power)))
    integral = math.sqrt(
        horizon
        * math.fsum(
            power_integral(acc.ridge, max(acc.ridge, float(v)), power)
            for v in acc.eigenvalues(acc.step)
        )
    )
    regime = math.sqrt(horizon * _regime_value(acc, power))
    final = epl_upper_bound(horizon, acc.dim, acc.ridge, power)

    def tol(value: float) -> float:
        return CHAIN_TOLERANCE * max(1.0, abs(value))

    return [
        make_report("increment_bound", total, rooted, tol(rooted)),
        make_report("jensen", rooted, jensen, tol(jensen)),
        make_report("integral_comparison", substituted, integral, tol(integral)),
        make_report("regime_integral", integral, regime, tol(regime)),
        make_report("final_bound", regime, final, tol(final)),
    ]


def chain_is_monotone(reports: Sequence[ProofStepReport]) -> bool:
    for current, following in zip(reports, reports[1:]):
        if current.rhs > following.rhs + CHAIN_TOLERANCE * max(1.0, abs(following.rhs)):
            return False
    return True


def chain_is_linked(reports: Sequence[ProofStepReport]) -> bool:
    for current, following in zip(reports, reports[1:]):
        if abs(current.rhs - following.lhs) > CHAIN_TOLERANCE * max(1.0, abs(current.rhs)):
            return False
    return True


def reports_to_json(reports: Iterable[ProofStepReport]) -> str:
    return json.dumps([report.to_dict() for report in reports], ensure_ascii=True, indent=2)
