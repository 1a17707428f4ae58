"""Distances between summary values, and their normalization.

Raw distances are absolute differences.  Because different statistics
live on wildly different scales (an FFT magnitude vs. a quantile of copy
numbers), raw distances are mapped to [0, 1] by min-max scaling before
they are compared across statistics or turned into rewards.  The scaling
ranges come from a calibration set of prior-predictive simulations and
stay frozen afterwards; distances outside the calibrated range clamp to
the boundary.

Rewards are negated normalized distances, so they live in [-1, 0] and
larger is better.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractViolationError, StateError
from .summaries import StatisticPool, evaluate_pool


def raw_distance(sim_value: float, obs_value: float) -> float:
    """Absolute difference between one simulated and one observed summary value."""
    if not (math.isfinite(sim_value) and math.isfinite(obs_value)):
        raise ContractViolationError("summary values must be finite")
    return abs(sim_value - obs_value)


@dataclass(frozen=True)
class ObservedSummary:
    """Pool summary values of the observed data: mean over observed trajectories."""

    per_statistic: np.ndarray
    n_observed: int

    def __post_init__(self):
        object.__setattr__(
            self, "per_statistic", np.asarray(self.per_statistic, dtype=np.float64)
        )
        if self.n_observed < 1:
            raise ConfigError("need at least one observed trajectory")


def observed_summary(pool: StatisticPool, trajectories) -> ObservedSummary:
    """Summarise observed trajectories: evaluate the pool on each, average."""
    rows = [evaluate_pool(pool, y) for y in trajectories]
    if not rows:
        raise ConfigError("need at least one observed trajectory")
    return ObservedSummary(np.mean(rows, axis=0), len(rows))


@dataclass(frozen=True)
class NormalizationState:
    """Frozen per-statistic min-max ranges for raw distances."""

    lower: np.ndarray
    upper: np.ndarray
    calibration_size: int

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64)
        upper = np.asarray(self.upper, dtype=np.float64)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ConfigError("lower and upper must be 1-d arrays of equal length")
        if np.any(upper < lower):
            raise ConfigError("upper bounds must not fall below lower bounds")

    @property
    def n_statistics(self) -> int:
        return len(self.lower)

    @classmethod
    def from_raw_distances(cls, distances: np.ndarray) -> "NormalizationState":
        """Calibrate from a (n_calibration, K) matrix of raw distances."""
        distances = np.asarray(distances, dtype=np.float64)
        if distances.ndim != 2 or distances.shape[0] < 1:
            raise ConfigError("calibration needs a non-empty (n, K) distance matrix")
        if not np.all(np.isfinite(distances)):
            raise ConfigError("calibration distances must be finite")
        return cls(
            lower=distances.min(axis=0),
            upper=distances.max(axis=0),
            calibration_size=distances.shape[0],
        )

    def to_dict(self) -> dict:
        return {
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
            "calibration_size": self.calibration_size,
        }


def normalize(state: NormalizationState, stat_index: int, raw: float) -> float:
    """Min-max scale one raw distance to [0, 1], clamping outside the range.

    A degenerate range (every calibration distance identical) maps to 0.
    """
    if state is None or state.calibration_size < 1:
        raise StateError("normalization used before calibration")
    if not 0 <= stat_index < state.n_statistics:
        raise ConfigError(f"statistic index {stat_index} out of range")
    if raw < 0 or not math.isfinite(raw):
        raise ContractViolationError("raw distance must be finite and non-negative")
    lo = state.lower[stat_index]
    span = state.upper[stat_index] - lo
    if span == 0.0:
        return 0.0
    return float(min(1.0, max(0.0, (raw - lo) / span)))


def reward(normalized_distance: float) -> float:
    """Negated normalized distance; lives in [-1, 0], larger is better."""
    if not 0.0 <= normalized_distance <= 1.0:
        raise ContractViolationError(
            f"normalized distance must lie in [0, 1], got {normalized_distance}"
        )
    return -normalized_distance


def combined_distance(values_sim, values_obs, subset, state: NormalizationState) -> float:
    """L2 distance over a subset of statistics, in normalized units.

    Each per-statistic raw distance is normalized first; the result is
    divided by sqrt(len(subset)) so it stays in [0, 1] and a singleton
    subset reduces to the plain normalized distance.
    """
    values_sim = np.asarray(values_sim, dtype=np.float64)
    values_obs = np.asarray(values_obs, dtype=np.float64)
    if values_sim.shape != values_obs.shape:
        raise ConfigError("simulated and observed summary vectors differ in length")
    subset = list(subset)
    if not subset:
        raise ConfigError("subset must name at least one statistic")
    total = 0.0
    for i in subset:
        nd = normalize(state, i, raw_distance(values_sim[i], values_obs[i]))
        total += nd * nd
    return math.sqrt(total) / math.sqrt(len(subset))
