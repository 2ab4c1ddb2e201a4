from __future__ import annotations

import math

import numpy as np
import pytest

from eplkit.bandit import (
    GeneralizedLinUCBPolicy,
    LinearBanditEnv,
    constant_beta,
    log_beta,
    random_env,
    regret_curve,
    run_episode,
)
from eplkit.bounds import epl_upper_bound
from eplkit.errors import DimensionError


def _two_arm_env(theta: list[float], noise: float = 0.0) -> LinearBanditEnv:
    return LinearBanditEnv(theta=np.array(theta), arms=np.eye(2), noise=noise, seed=0)


def test_noiseless_greedy_picks_best_arm() -> None:
    env = _two_arm_env([1.0, 0.0])
    policy = GeneralizedLinUCBPolicy(2, 1.0, 1.0, constant_beta(0.0))
    trajectory = run_episode(env, policy, 20)
    assert trajectory.arms[1:] == [0] * 19
    assert trajectory.cumulative_regret <= trajectory.regrets[0]
    assert trajectory.rewards == [1.0] * 20


def test_zero_parameter_means_zero_regret() -> None:
    env = LinearBanditEnv(
        theta=np.zeros(3), arms=np.eye(3) * 0.5, noise=0.2, seed=4
    )
    trajectory = run_episode(env, GeneralizedLinUCBPolicy(3, 1.0, 2.0), 30)
    assert trajectory.regrets == [0.0] * 30
    assert regret_curve(trajectory) == [(t, 0.0) for t in range(1, 31)]


def test_reference_run_respects_potential_bound() -> None:
    env = random_env(2, 5, noise=0.1, seed=37)
    policy = GeneralizedLinUCBPolicy(2, 1.0, 1.0, constant_beta(1.0))
    trajectory = run_episode(env, policy, 2000)
    bound = math.sqrt(2.0) * epl_upper_bound(2000, 2, 1.0, 1.0)
    assert trajectory.potential_bound() == pytest.approx(bound)
    assert trajectory.potential_sum <= bound
    assert trajectory.bonus_sum <= trajectory.bonus_bound() + 1e-9
    curve = [value for _, value in regret_curve(trajectory)]
    assert all(later >= earlier for earlier, later in zip(curve, curve[1:]))
    assert curve[1999] / 2000 < curve[199] / 200


def test_episode_is_deterministic() -> None:
    def run() -> list[int]:
        env = random_env(3, 4, noise=0.3, seed=5)
        return run_episode(env, GeneralizedLinUCBPolicy(3, 1.0, 0.5), 60).arms

    assert run() == run()


def test_policy_estimate_after_one_update() -> None:
    policy = GeneralizedLinUCBPolicy(2, 1.0, 1.0)
    policy.update([1.0, 0.0], 1.0)
    np.testing.assert_allclose(policy.estimate(), [0.5, 0.0])
    assert policy.accumulator.step == 2


def test_select_breaks_ties_by_lowest_index() -> None:
    policy = GeneralizedLinUCBPolicy(2, 1.0, 1.0)
    choice = policy.select([[0.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
    assert choice.arm == 0
    assert choice.potential == pytest.approx(1.0)


def test_scores_add_scaled_potential() -> None:
    policy = GeneralizedLinUCBPolicy(2, 4.0, 2.0)
    scores = policy.scores(np.eye(2), beta=2.0)
    np.testing.assert_allclose(scores, [0.5, 0.5])


def test_env_validation() -> None:
    with pytest.raises(ValueError):
        LinearBanditEnv(theta=np.array([1.0, 1.0]), arms=np.eye(2))
    with pytest.raises(ValueError):
        LinearBanditEnv(theta=np.array([1.0, 0.0]), arms=np.array([[2.0, 0.0]]))
    with pytest.raises(DimensionError):
        LinearBanditEnv(theta=np.array([1.0, 0.0]), arms=np.eye(3))
    with pytest.raises(ValueError):
        LinearBanditEnv(theta=np.array([1.0, 0.0]), arms=np.eye(2), noise=-1.0)


def test_random_env_is_normalized() -> None:
    env = random_env(4, 6, noise=0.1, seed=2)
    np.testing.assert_allclose(np.linalg.norm(env.arms, axis=1), 1.0)
    assert np.linalg.norm(env.theta) == pytest.approx(1.0)


def test_run_episode_checks_arguments() -> None:
    env = _two_arm_env([1.0, 0.0])
    with pytest.raises(ValueError):
        run_episode(env, GeneralizedLinUCBPolicy(2, 1.0, 1.0), 0)
    with pytest.raises(DimensionError):
        run_episode(env, GeneralizedLinUCBPolicy(3, 1.0, 1.0), 5)


def test_beta_schedules() -> None:
    assert constant_beta(2.0)(10) == 2.0
    assert log_beta(1.0)(0) == 0.0
    assert log_beta(2.0)(math.e - 1.0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        constant_beta(-1.0)
    with pytest.raises(ValueError):
        log_beta(-1.0)


def test_first_choice_ignores_bonus_scale() -> None:
    arms = random_env(3, 6, noise=0.0, seed=13).arms * np.linspace(0.3, 1.0, 6)[:, None]
    choices = {
        GeneralizedLinUCBPolicy(3, 1.0, 1.5, constant_beta(beta)).select(arms).arm
        for beta in (0.1, 1.0, 10.0)
    }
    assert choices == {5}


def test_common_scaling_of_scores_keeps_arm_sequence() -> None:
    base = random_env(2, 5, noise=0.2, seed=29)
    halved = LinearBanditEnv(
        theta=base.theta * 0.5, arms=base.arms, noise=base.noise * 0.5, seed=base.seed
    )
    first = run_episode(base, GeneralizedLinUCBPolicy(2, 1.0, 1.0, constant_beta(1.0)), 150)
    second = run_episode(halved, GeneralizedLinUCBPolicy(2, 1.0, 1.0, constant_beta(0.5)), 150)
    assert second.arms == first.arms


def test_regret_curve_non_decreasing_with_noise() -> None:
    env = random_env(3, 4, noise=0.5, seed=31)
    curve = regret_curve(run_episode(env, GeneralizedLinUCBPolicy(3, 1.0, 0.5), 120))
    assert [t for t, _ in curve] == list(range(1, 121))
    values = [value for _, value in curve]
    assert values[0] >= 0.0
    assert all(later >= earlier for earlier, later in zip(values, values[1:]))
