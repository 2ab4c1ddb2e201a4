"""Full-size sweeps. Run with ``pytest -m slow``."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from eplkit.bandit import GeneralizedLinUCBPolicy, constant_beta, random_env, run_episode
from eplkit.bounds import (
    Convention,
    empirical_sum,
    epl_upper_bound,
    increment_bound_check,
    lower_bound_sequence,
    lower_bound_value,
    run_sequence,
    sandwich_check,
)
from eplkit.exports import trajectory_to_csv
from eplkit.linalg import (
    mat_power,
    max_abs,
    random_orthogonal,
    rank1_update,
    reconstruction_error,
    sym_eig,
    trace_rotation_check,
    weyl_check,
)
from eplkit.sequences import SequenceKind, generate
from eplkit.suites import random_pd
from eplkit.verifiers import chain_is_monotone, proof_chain_report

pytestmark = pytest.mark.slow


def test_upper_bound_and_increment_sweep() -> None:
    grid = itertools.product((1, 2, 4, 8), (10, 100, 500), (1.0, 2.0), (0.5, 1.0, 2.0, 5.0))
    for dim, horizon, ridge, power in grid:
        bound = epl_upper_bound(horizon, dim, ridge, power)
        for seed in range(50):
            acc = run_sequence(generate(SequenceKind.RANDOM_UNIT, horizon, dim, seed), ridge, power)
            assert empirical_sum(acc, Convention.NEXT) <= bound + 1e-9
            for t in range(1, acc.step):
                report = increment_bound_check(acc, t, power)
                assert report.ok
                if dim == 1:
                    assert abs(report.lhs - report.rhs) <= 1e-12


def test_lower_bound_floor() -> None:
    cases = [(1.0, 2.0)] + list(itertools.product((0.5, 2.0), (1.5, 4.0)))
    for ridge, power in cases:
        sequence = [[value] for value in lower_bound_sequence(10000)]
        total = empirical_sum(run_sequence(sequence, ridge, power))
        assert total >= lower_bound_value(10000, ridge, power)
    assert lower_bound_value(10000, 1.0, 2.0) == 50.0


def test_sandwich_sweep() -> None:
    rng = np.random.default_rng(500)
    for _ in range(500):
        dim = int(rng.integers(1, 6))
        sequence = generate(SequenceKind.RANDOM_SUBUNIT, int(rng.integers(1, 60)), dim, rng)
        ridge = float(rng.choice((1.0, 2.0)))
        power = float(rng.choice((0.5, 1.0, 2.0, 3.0)))
        assert sandwich_check(sequence, ridge, power).ok


def test_weyl_and_trace_sweep() -> None:
    rng = np.random.default_rng(11)
    for _ in range(50000):
        dim = int(rng.integers(1, 7))
        matrix = random_pd(dim, rng)
        u = rng.standard_normal(dim)
        assert weyl_check(sym_eig(matrix), sym_eig(rank1_update(matrix, u))).ok
    rng = np.random.default_rng(19)
    for _ in range(50000):
        sigma = np.sort(rng.uniform(0.05, 10.0, size=5))[::-1]
        sigma_prime = np.sort(rng.uniform(0.05, 10.0, size=5))[::-1]
        q = random_orthogonal(5, rng)
        r = random_orthogonal(5, rng)
        assert trace_rotation_check(sigma, sigma_prime, q, r).ok


def test_proof_chain_sweep() -> None:
    rng = np.random.default_rng(31)
    for _ in range(100):
        dim = int(rng.integers(1, 5))
        sequence = generate(SequenceKind.RANDOM_UNIT, int(rng.integers(1, 100)), dim, rng)
        ridge = float(rng.choice((0.5, 1.0, 2.0)))
        power = float(rng.choice((0.5, 1.0, 2.0, 3.0, 5.0)))
        reports = proof_chain_report(sequence, ridge, power)
        assert all(report.passed for report in reports)
        assert chain_is_monotone(reports)


def test_numerical_core_at_scale() -> None:
    rng = np.random.default_rng(7)
    for _ in range(100):
        matrix = random_pd(8, rng)
        eig = sym_eig(matrix)
        assert reconstruction_error(eig, matrix) <= 1e-10 * max(1.0, max_abs(matrix))
        product = mat_power(eig, 0.5) @ mat_power(eig, -2.0)
        assert max_abs(mat_power(eig, -1.5) - product) <= 1e-8 * max(1.0, max_abs(product))

    acc = run_sequence(generate(SequenceKind.RANDOM_UNIT, 1000, 8, seed=1), 1.0, 1.0)
    rebuilt = acc.rebuild_matrix()
    scale = max_abs(rebuilt)
    assert max_abs(acc.matrix - rebuilt) <= 1e-9 * scale


def test_bandit_reference_run() -> None:
    def episode() -> tuple[float, str]:
        env = random_env(2, 5, noise=0.1, seed=37)
        policy = GeneralizedLinUCBPolicy(2, 1.0, 1.0, constant_beta(1.0))
        trajectory = run_episode(env, policy, 2000)
        return trajectory.potential_sum, trajectory_to_csv(trajectory)

    potential_sum, first = episode()
    _, second = episode()
    assert potential_sum <= math.sqrt(2.0) * math.sqrt(4000.0 * math.log(1001.0))
    assert first == second
