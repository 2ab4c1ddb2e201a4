from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .accumulator import DesignAccumulator
from .bounds import epl_upper_bound
from .errors import DimensionError
from .linalg import Vector
from .potential import weighted_norm

BetaSchedule = Callable[[int], float]

NORM_TOLERANCE = 1e-12


def constant_beta(value: float) -> BetaSchedule:
    if value < 0:
        raise ValueError(f"Confidence width must be non-negative, got {value}")
    return lambda t: value


def log_beta(scale: float) -> BetaSchedule:
    """scale · √(log(1 + t))."""
    if scale < 0:
        raise ValueError(f"Confidence width must be non-negative, got {scale}")
    return lambda t: scale * math.sqrt(math.log1p(t))


@dataclass(frozen=True)
class Choice:
    arm: int
    beta: float
    potential: float


@dataclass(frozen=True)
class LinearBanditEnv:
    theta: Vector
    arms: NDArray[np.float64]
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        theta = np.asarray(self.theta, dtype=np.float64).reshape(-1)
        arms = np.atleast_2d(np.asarray(self.arms, dtype=np.float64))
        if arms.shape[0] < 1:
            raise ValueError("Arm set must not be empty")
        if arms.shape[1] != theta.shape[0]:
            raise DimensionError(
                f"Arms have dimension {arms.shape[1]}, parameter has {theta.shape[0]}"
            )
        if np.linalg.norm(theta) > 1.0 + NORM_TOLERANCE:
            raise ValueError("Parameter norm must be at most 1")
        norms = np.linalg.norm(arms, axis=1)
        if np.any(norms > 1.0 + NORM_TOLERANCE):
            index = int(np.argmax(norms))
            raise ValueError(f"Arm {index} has norm {norms[index]:.12g} > 1")
        if self.noise < 0:
            raise ValueError(f"Noise scale must be non-negative, got {self.noise}")
        theta.flags.writeable = False
        arms.flags.writeable = False
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "arms", arms)

    @property
    def dim(self) -> int:
        return int(self.theta.shape[0])

    def expected_rewards(self) -> Vector:
        return self.arms @ self.theta

    def pull(self, arm: int, rng: np.random.Generator) -> float:
        mean = float(self.arms[arm] @ self.theta)
        return mean + self.noise * float(rng.standard_normal())


def random_env(
    dim: int,
    n_arms: int,
    noise: float,
    seed: int,
) -> LinearBanditEnv:
    rng = np.random.default_rng(seed)
    arms = rng.standard_normal((n_arms, dim))
    arms /= np.maximum(np.linalg.norm(arms, axis=1, keepdims=True), 1e-300)
    theta = rng.standard_normal(dim)
    theta /= max(float(np.linalg.norm(theta)), 1e-300)
    return LinearBanditEnv(theta=theta, arms=arms, noise=noise, seed=seed)


class GeneralizedLinUCBPolicy:
    """LinUCB whose exploration bonus is β_t · ‖a‖_{V_t^{-p}}."""

    def __init__(
        self,
        dim: int,
        ridge: float,
        power: float,
        beta: BetaSchedule | None = None,
    ) -> None:
        self.accumulator = DesignAccumulator(dim, ridge, power)
        self.beta = beta or constant_beta(1.0)
        self._rewards = np.zeros(dim)

    @property
    def dim(self) -> int:
        return self.accumulator.dim

    @property
    def power(self) -> float:
        return self.accumulator.power

    @property
    def ridge(self) -> float:
        return self.accumulator.ridge

    def estimate(self) -> Vector:
        """Ridge estimate V_t^{-1} Σ r_s u_s, solved in the eigenbasis."""
        eig = self.accumulator.current
        coords = eig.basis.T @ self._rewards
        return eig.basis @ (coords / eig.eigenvalues)

    def potentials(self, arms: ArrayLike) -> Vector:
        spec = self.accumulator.potential()
        return np.array([weighted_norm(spec, arm) for arm in np.atleast_2d(arms)])

    def scores(self, arms: ArrayLike, beta: float) -> Vector:
        candidates = np.atleast_2d(np.asarray(arms, dtype=np.float64))
        return candidates @ self.estimate() + beta * self.potentials(candidates)

    def select(self, arms: ArrayLike) -> Choice:
        candidates = np.atleast_2d(np.asarray(arms, dtype=np.float64))
        beta = self.beta(self.accumulator.step)
        potentials = self.potentials(candidates)
        scores = candidates @ self.estimate() + beta * potentials
        # argmax returns the first maximum, i.e. the lowest arm index on ties.
        arm = int(np.argmax(scores))
        return Choice(arm=arm, beta=beta, potential=float(potentials[arm]))

    def update(self, arm: ArrayLike, reward: float) -> None:
        vector = np.asarray(arm, dtype=np.float64).reshape(-1)
        self.accumulator.observe(vector)
        self._rewards = self._rewards + reward * vector


@dataclass(frozen=True)
class Trajectory:
    arms: list[int]
    rewards: list[float]
    regrets: list[float]
    potentials: list[float]
    bonuses: list[float]
    betas: list[float]
    ridge: float
    power: float
    dim: int

    @property
    def horizon(self) -> int:
        return len(self.arms)

    @property
    def potential_sum(self) -> float:
        return math.fsum(self.potentials)

    @property
    def bonus_sum(self) -> float:
        return math.fsum(self.bonuses)

    @property
    def cumulative_regret(self) -> float:
        return math.fsum(self.regrets)

    def potential_bound(self) -> float:
        """2^{p/2} · epl_upper_bound, valid for ridge >= 1."""
        return 2.0 ** (self.power / 2.0) * epl_upper_bound(
            self.horizon, self.dim, self.ridge, self.power
        )

    def bonus_bound(self) -> float:
        return max(self.betas, default=0.0) * self.potential_bound()


def run_episode(
    env: LinearBanditEnv,
    policy: GeneralizedLinUCBPolicy,
    horizon: int,
) -> Trajectory:
    if horizon < 1:
        raise ValueError(f"Horizon must be at least 1, got {horizon}")
    if env.dim != policy.dim:
        raise DimensionError(f"Environment dimension {env.dim} != policy dimension {policy.dim}")
    rng = np.random.default_rng(env.seed)
    expected = env.expected_rewards()
    best = float(np.max(expected))

    arms: list[int] = []
    rewards: list[float] = []
    regrets: list[float] = []
    potentials: list[float] = []
    bonuses: list[float] = []
    betas: list[float] = []
    for _ in range(horizon):
        choice = policy.select(env.arms)
        reward = env.pull(choice.arm, rng)
        policy.update(env.arms[choice.arm], reward)

        arms.append(choice.arm)
        rewards.append(reward)
        regrets.append(best - float(expected[choice.arm]))
        potentials.append(choice.potential)
        bonuses.append(choice.beta * choice.potential)
        betas.append(choice.beta)

    return Trajectory(
        arms=arms,
        rewards=rewards,
        regrets=regrets,
        potentials=potentials,
        bonuses=bonuses,
        betas=betas,
        ridge=policy.ridge,
        power=policy.power,
        dim=policy.dim,
    )


def regret_curve(trajectory: Trajectory) -> list[tuple[int, float]]:
    cumulative = np.cumsum(np.asarray(trajectory.regrets, dtype=np.float64))
    return [(t, float(value)) for t, value in enumerate(cumulative, start=1)]
