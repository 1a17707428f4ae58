"""Arm selection over a pool of summary statistics.

Each candidate statistic is one arm.  A pull observes the reward
-normalized_distance for that statistic on a fresh simulation, so means
over pulls estimate which statistic discriminates best near the observed
data.  The ledger stores every observed reward, one row per simulation
iteration; during pure exploration a row may carry rewards for all arms
at once (they all come from the same simulated trajectory).

Strategies: epsilon_first explores uniformly for a fixed budget of
iterations and exploits the empirical best arm afterwards;
epsilon_greedy flips an epsilon coin every iteration; epsilon_decreasing
shrinks epsilon as 1/(iteration+1); uniform_random never exploits.

Selection at iteration m is a pure function of (ledger, config, m): the
per-iteration generator is seeded with (config.seed, m), so replaying a
run reproduces every choice no matter how other streams advanced.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ConfigError, ContractViolationError, SelectionError, StateError

STRATEGIES = ("epsilon_first", "epsilon_greedy", "epsilon_decreasing", "uniform_random")

PHASE_EXPLORATION = "exploration"
PHASE_EXPLOITATION = "exploitation"


def exploration_budget(epsilon: float, n_accept: int) -> int:
    """Number of forced exploration iterations: ceil(epsilon * n_accept).

    The small slack guards against float products like 0.1 * 30 landing
    just above the integer they represent.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ConfigError(f"epsilon must lie in [0, 1], got {epsilon}")
    if n_accept < 0:
        raise ConfigError("n_accept cannot be negative")
    return max(0, math.ceil(epsilon * n_accept - 1e-9))


@dataclass(frozen=True)
class BanditConfig:
    strategy: str
    epsilon: float
    exploration_budget: int
    seed: int
    tie_break: str = "lowest_index"
    record_all: bool = True

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.exploration_budget < 0:
            raise ConfigError("exploration budget cannot be negative")
        if self.strategy == "epsilon_first" and self.epsilon > 0 and self.exploration_budget < 1:
            raise ConfigError("epsilon_first with epsilon > 0 needs a positive budget")
        if self.tie_break != "lowest_index":
            raise ConfigError(f"unsupported tie break {self.tie_break!r}")


@dataclass(frozen=True)
class LedgerRow:
    iteration: int
    rewards: Mapping  # arm index -> reward in [-1, 0]
    phase: str

    def __post_init__(self):
        object.__setattr__(self, "rewards", dict(self.rewards))


class RewardLedger:
    """Append-only record of observed rewards with running per-arm tallies."""

    def __init__(self, n_arms: int):
        if n_arms < 1:
            raise ConfigError("ledger needs at least one arm")
        self.rows: list = []
        self.pull_counts = np.zeros(n_arms, dtype=np.int64)
        self.running_sums = np.zeros(n_arms, dtype=np.float64)

    @property
    def n_arms(self) -> int:
        return len(self.pull_counts)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def any_pulls(self) -> bool:
        return bool(self.pull_counts.sum() > 0)

    def record(self, iteration: int, rewards: Mapping, phase: str = PHASE_EXPLORATION) -> None:
        """Append one iteration's rewards (one entry per arm observed)."""
        if iteration != len(self.rows):
            raise ContractViolationError(
                f"rows must be recorded in iteration order; expected {len(self.rows)}, "
                f"got {iteration}"
            )
        if phase not in (PHASE_EXPLORATION, PHASE_EXPLOITATION):
            raise ContractViolationError(f"unknown phase {phase!r}")
        if not rewards:
            raise ContractViolationError("a ledger row needs at least one reward")
        for arm, r in rewards.items():
            if not 0 <= arm < self.n_arms:
                raise ContractViolationError(f"arm index {arm} out of range")
            if not (math.isfinite(r) and -1.0 <= r <= 0.0):
                raise ContractViolationError(f"reward must lie in [-1, 0], got {r}")
        self.rows.append(LedgerRow(iteration, rewards, phase))
        for arm, r in rewards.items():
            self.pull_counts[arm] += 1
            self.running_sums[arm] += r

    def arm_means(self) -> np.ndarray:
        """Mean reward per arm; NaN for arms never pulled."""
        with np.errstate(invalid="ignore"):
            return np.where(
                self.pull_counts > 0,
                self.running_sums / np.maximum(self.pull_counts, 1),
                np.nan,
            )

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "arm_id", "reward", "phase"])
            for row in self.rows:
                for arm in sorted(row.rewards):
                    writer.writerow([row.iteration, arm, repr(row.rewards[arm]), row.phase])

    @classmethod
    def from_csv(cls, path, n_arms: int) -> "RewardLedger":
        ledger = cls(n_arms)
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["iteration", "arm_id", "reward", "phase"]:
                raise ConfigError(f"{path}: unexpected ledger header {header}")
            current_iter, current_rewards, current_phase = None, {}, None
            for row in reader:
                if not row:
                    continue
                it, arm, r, phase = int(row[0]), int(row[1]), float(row[2]), row[3]
                if current_iter is None:
                    current_iter, current_phase = it, phase
                elif it != current_iter:
                    ledger.record(current_iter, current_rewards, current_phase)
                    current_iter, current_rewards, current_phase = it, {}, phase
                current_rewards[arm] = r
            if current_iter is not None:
                ledger.record(current_iter, current_rewards, current_phase)
        return ledger


def _exploit(ledger: RewardLedger) -> int:
    if not ledger.any_pulls():
        raise SelectionError("exploitation requested but no arm has been pulled yet")
    means = ledger.arm_means()
    means = np.where(np.isnan(means), -np.inf, means)
    return int(np.argmax(means))  # argmax takes the first maximum: lowest index wins ties


def select_with_phase(ledger: RewardLedger, config: BanditConfig, iteration: int) -> tuple:
    """Pick an arm for this iteration; returns (arm, phase)."""
    if iteration < 0:
        raise ConfigError("iteration cannot be negative")
    rng = np.random.default_rng((config.seed, iteration))
    K = ledger.n_arms

    if config.strategy == "uniform_random":
        return int(rng.integers(K)), PHASE_EXPLORATION

    if config.strategy == "epsilon_first":
        if iteration < config.exploration_budget:
            return int(rng.integers(K)), PHASE_EXPLORATION
        return _exploit(ledger), PHASE_EXPLOITATION

    if config.strategy == "epsilon_greedy":
        eps = config.epsilon
    else:  # epsilon_decreasing
        eps = min(1.0, config.epsilon / (iteration + 1))
    # an empty ledger cannot be exploited, so it forces an exploration step
    if rng.random() < eps or not ledger.any_pulls():
        return int(rng.integers(K)), PHASE_EXPLORATION
    return _exploit(ledger), PHASE_EXPLOITATION


def select_arm(ledger: RewardLedger, config: BanditConfig, iteration: int) -> int:
    """Arm index chosen at this iteration (see select_with_phase)."""
    return select_with_phase(ledger, config, iteration)[0]


@dataclass(frozen=True)
class ArmRank:
    arm: int
    mean_reward: float
    pulls: int


def rank_arms(ledger: RewardLedger) -> list:
    """Arms sorted by mean reward, best first.

    Ties break by pull count (more pulls first), then by arm index.
    Arms never pulled trail the list in index order.
    """
    if not ledger.any_pulls():
        raise StateError("cannot rank arms before any reward is recorded")
    means = ledger.arm_means()
    pulled = [
        ArmRank(i, float(means[i]), int(ledger.pull_counts[i]))
        for i in range(ledger.n_arms)
        if ledger.pull_counts[i] > 0
    ]
    pulled.sort(key=lambda a: (-a.mean_reward, -a.pulls, a.arm))
    trailing = [
        ArmRank(i, float("nan"), 0)
        for i in range(ledger.n_arms)
        if ledger.pull_counts[i] == 0
    ]
    return pulled + trailing
