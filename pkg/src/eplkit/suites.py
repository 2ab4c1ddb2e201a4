"""Randomized falsification suites behind ``eplkit verify``.

Each trial draws its inputs from a generator seeded by (seed, suite, trial),
so outcomes do not depend on the order trials run in.
"""

from __future__ import annotations

import logging
import zlib
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bandit import GeneralizedLinUCBPolicy, constant_beta, random_env, run_episode
from .bounds import (
    CHECK_TOLERANCE,
    Convention,
    empirical_sum,
    epl_upper_bound,
    increment_bound_check,
    lower_bound_sequence,
    lower_bound_value,
    run_sequence,
    sandwich_check,
)
from .exports import SuiteOutcome
from .linalg import (
    max_abs,
    mat_power,
    orthogonality_error,
    random_orthogonal,
    rank1_update,
    reconstruction_error,
    sym_eig,
    sym_matrix,
    trace_rotation_check,
    weyl_check,
    weyl_general_check,
)
from .sequences import SequenceKind, generate
from .verifiers import (
    CHAIN_TOLERANCE,
    ProofStepReport,
    integral_comparison_check,
    jensen_step_check,
    make_report,
    proof_chain_report,
    rotation_step_check,
    substitution_identity_check,
    trace_identity_check,
)

logger = logging.getLogger(__name__)

Trial = Callable[[np.random.Generator], list[ProofStepReport]]

POWER_GRID = (0.5, 1.0, 2.0, 3.0, 5.0)
INTEGRAL_POWERS = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 5.0)
ALGEBRA_EXPONENTS = (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)
_RANDOM_KINDS = (
    SequenceKind.RANDOM_UNIT,
    SequenceKind.RANDOM_SUBUNIT,
    SequenceKind.AXIS,
    SequenceKind.REPEAT,
)


@dataclass(frozen=True)
class Suite:
    name: str
    weight: float
    trial: Trial

    def trial_count(self, base: int) -> int:
        return max(1, round(base * self.weight))


def random_pd(dim: int, rng: np.random.Generator, ridge: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((dim, dim))
    return sym_matrix(ridge * np.eye(dim) + g @ g.T / dim)


def random_spectrum(dim: int, rng: np.random.Generator) -> np.ndarray:
    return np.sort(rng.uniform(0.05, 10.0, size=dim))[::-1].copy()


def _worst(reports: Sequence[ProofStepReport]) -> ProofStepReport:
    failing = [report for report in reports if not report.passed]
    if failing:
        return failing[0]
    return min(reports, key=lambda report: report.slack)


def linalg_trial(rng: np.random.Generator) -> list[ProofStepReport]:
    dim = int(rng.integers(1, 9))
    matrix = random_pd(dim, rng)
    eig = sym_eig(matrix)
    scale = max(1.0, max_abs(matrix))
    a, b = (float(x) for x in rng.choice(ALGEBRA_EXPONENTS, size=2))
    product = mat_power(eig, a) @ mat_power(eig, b)
    algebra = max_abs(mat_power(eig, a + b) - product)
    return [
        make_report("reconstruction", reconstruction_error(eig, matrix), 0.0, 1e-10 * scale),
        make_report("orthogonality", orthogonality_error(eig.basis), 0.0, 1e-10),
        make_report("power_algebra", algebra, 0.0, 1e-8 * max(1.0, max_abs(product))),
    ]


def weyl_trial(rng: np.random.Generator) -> list[ProofStepReport]:
    dim = int(rng.integers(1, 7))
    matrix = random_pd(dim, rng)
    u = rng.standard_normal(dim)
    before = sym_eig(matrix)
    after = sym_eig(rank1_update(matrix, u))
    report = weyl_check(before, after)
    worst = -float(np.min(report.margins))
    return [ProofStepReport("weyl", worst, 0.0, -worst, report.ok)]


def weyl_general_trial(rng: np.random.Generator) -> list[ProofStepReport]:
    dim = int(rng.integers(1, 6))
    a = rng.standard_normal((dim, dim))
    b = rng.standard_normal((dim, dim))
    report = weyl_general_check(a + a.T, b + b.T)
    worst = -min(report.lower_margin, report.upper_margin)
    return [ProofStepReport("weyl_general", worst, 0.0, -worst, report.ok)]


def trace_rotation_trial(rng: np.random.Generator) -> list[ProofStepReport]:
    dim = int(rng.integers(1, 7))
    report = trace_rotation_check(
        random_spectrum(dim, rng),
        random_spectrum(dim, rng),
        random_orthogonal(dim, rng),
        random_orthogonal(dim, rng),
    )
    slack = 1e-9 * max(1.0, abs(report.upper))
    return [
        make_report("trace_lower", report.lower, report.middle, slack),
        make_report("trace_upper", report.middle, report.upper, slack),
    ]


def jensen_trial(rng: np.random.Generator) -> list[ProofStepReport]:
    length = int(rng.integers(1, 51))
    return [jensen_step_check(rng.exponential(1.0, size=length))]


def integral_trial(rng: np.random.Generator) -> list[ProofStepReport]:
    length = int(rng.integers(1, 101))
    ridge = float(rng.uniform(0.1, 3.0))
    power = float(rng.choice(INTEGRAL_POWERS))
    return [integral_comparison_check(rng.uniform(0.0, 1.0, size=length), ridge, power)]


def _random_sequence(
    rng: np.random.Generator, max_dim: int, max_horizon: int
) -> list[np.ndarray]:
    kind = _RANDOM_KINDS[int(rng.integers(len(_RANDOM_KINDS)))]
    dim = int(rng.integers(1, max_dim + 1))
    horizon = int(rng.integers(1, max_horizon + 1))
    return generate(kind, horizon, dim, rng)


def sequence_trial(rng: np.random.Generator) -> list[ProofStepReport]:
    sequence = _random_sequence(rng, max_dim=5, max_horizon=40)
    ridge = float(rng.choice((1.0, 2.0)))
    power = float(rng.choice(POWER_GRID))
    acc = run_sequence(sequence, ridge, power)
    horizon = acc.step - 1

    total = empirical_sum(acc, Convention.NEXT)
    bound = epl_upper_bound(horizon, acc.dim, ridge, power)
    sandwich = sandwich_check(sequence, ridge, power)
    factor = 2.0 ** (power / 2.0)
    sandwich_slack = CHECK_TOLERANCE * max(1.0, sandwich.sum_current)

    increments = []
    for t in range(1, acc.step):
        check = increment_bound_check(acc, t, power)
        increments.append(
            ProofStepReport(
                step="increment_bound",
                lhs=check.lhs,
                rhs=check.rhs,
                slack=check.rhs - check.lhs,
                passed=check.ok,
            )
        )
    substitutions = [
        substitution_identity_check(acc, i, t) for i in range(acc.dim) for t in range(acc.step)
    ]
    rotations = [rotation_step_check(acc, t, power) for t in range(1, acc.step)]
    identities = [trace_identity_check(acc, t, power) for t in range(1, acc.step)]
    return [
        make_report("upper_bound", total, bound, 1e-9),
        make_report("sandwich_left", sandwich.sum_next, sandwich.sum_current, sandwich_slack),
        make_report(
            "sandwich_right", sandwich.sum_current, factor * sandwich.sum_next, sandwich_slack
        ),
        _worst(increments),
        _worst(substitutions),
        _worst(rotations),
        _worst(identities),
    ]


def lower_bound_trial(rng: np.random.Generator) -> list[ProofStepReport]:
    horizon = int(rng.integers(1, 2001))
    ridge = float(rng.choice((0.5, 1.0, 2.0)))
    power = float(rng.choice((1.5, 2.0, 4.0)))
    acc = run_sequence(lower_bound_sequence(horizon), ridge, power)
    floor = lower_bound_value(horizon, ridge, power)
    return [
        make_report("lower_bound_next", floor, empirical_sum(acc, Convention.NEXT), 1e-12),
        make_report("lower_bound_current", floor, empirical_sum(acc, Convention.CURRENT), 1e-12),
    ]


def proof_chain_trial(rng: np.random.Generator) -> list[ProofStepReport]:
    sequence = _random_sequence(rng, max_dim=4, max_horizon=60)
    ridge = float(rng.choice((0.5, 1.0, 2.0)))
    power = float(rng.choice(POWER_GRID))
    reports = proof_chain_report(sequence, ridge, power)
    loosening = max(
        (current.rhs - following.rhs for current, following in zip(reports, reports[1:])),
        default=0.0,
    )
    scale = max(1.0, abs(reports[-1].rhs))
    return [*reports, make_report("chain_monotone", loosening, 0.0, CHAIN_TOLERANCE * scale)]


def bandit_trial(rng: np.random.Generator) -> list[ProofStepReport]:
    dim = int(rng.integers(2, 5))
    n_arms = int(rng.integers(2, 7))
    power = float(rng.choice((0.5, 1.0, 2.0)))
    ridge = float(rng.choice((1.0, 2.0)))
    env = random_env(dim, n_arms, noise=0.1, seed=int(rng.integers(2**31)))
    policy = GeneralizedLinUCBPolicy(dim, ridge, power, constant_beta(1.0))
    trajectory = run_episode(env, policy, 200)
    bound = trajectory.potential_bound()
    return [make_report("bandit_potential_sum", trajectory.potential_sum, bound, 1e-9)]


SUITES: list[Suite] = [
    Suite("linalg", 0.2, linalg_trial),
    Suite("weyl", 2.0, weyl_trial),
    Suite("weyl_general", 0.2, weyl_general_trial),
    Suite("trace_rotation", 5.0, trace_rotation_trial),
    Suite("jensen", 2.0, jensen_trial),
    Suite("integral_comparison", 1.0, integral_trial),
    Suite("sequence", 0.05, sequence_trial),
    Suite("lower_bound", 0.01, lower_bound_trial),
    Suite("proof_chain", 0.01, proof_chain_trial),
    Suite("bandit", 0.001, bandit_trial),
]


def suite_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def run_suite(suite: Suite, trials: int, seed: int) -> SuiteOutcome:
    key = suite_key(suite.name)
    failures = 0
    sample: list[ProofStepReport] = []
    first_failure: dict[str, object] | None = None
    for trial in range(trials):
        rng = np.random.default_rng([seed, key, trial])
        reports = suite.trial(rng)
        failing = [report for report in reports if not report.passed]
        if trial == 0:
            sample = reports
        if failing:
            failures += 1
            if first_failure is None:
                first_failure = {
                    "trial": trial,
                    "seed": [seed, key, trial],
                    "step": failing[0].step,
                }
                sample = failing
                logger.warning(
                    "Suite %s failed at trial %d (step %s, lhs %.6g, rhs %.6g)",
                    suite.name,
                    trial,
                    failing[0].step,
                    failing[0].lhs,
                    failing[0].rhs,
                )
    logger.info("Suite %s: %d trials, %d failures", suite.name, trials, failures)
    return SuiteOutcome(
        suite=suite.name,
        trials=trials,
        failures=failures,
        reports=sample,
        first_failure=first_failure,
    )


def run_suites(
    base_trials: int,
    seed: int,
    suites: Sequence[Suite] | None = None,
) -> list[SuiteOutcome]:
    if base_trials < 1:
        raise ValueError(f"Trials must be at least 1, got {base_trials}")
    selected = SUITES if suites is None else suites
    return [run_suite(suite, suite.trial_count(base_trials), seed) for suite in selected]


def total_trials(outcomes: Sequence[SuiteOutcome]) -> int:
    return sum(outcome.trials for outcome in outcomes)

