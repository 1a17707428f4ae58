"""Scalar summary statistics over trajectories.

Each statistic maps a series of copy numbers to one float.  The families
follow the usual time-series feature extraction playbook: moments,
quantiles, autocorrelations, FFT coefficients, relative index of mass
quantiles, peak/run counts, and change-based complexity measures.

Degenerate inputs (constant series, out-of-range FFT bin, zero total
mass, lag longer than the series) evaluate to 0.0 rather than raising,
so a pool can always be evaluated on whatever the simulator returns.
Every statistic is a pure function of its input series.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..errors import ConfigError

FAMILIES = (
    "moment",
    "quantile",
    "autocorrelation",
    "spectral",
    "mass-quantile",
    "count",
    "complexity",
)


@dataclass(frozen=True)
class SummaryStatistic:
    """Identifier plus the family/parameter pair that defines the computation."""

    id: str
    family: str
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown statistic family {self.family!r}")
        object.__setattr__(self, "params", dict(self.params))


@dataclass(frozen=True)
class StatisticPool:
    """An ordered set of at least two distinct statistics (the bandit's arms)."""

    statistics: tuple

    def __post_init__(self):
        object.__setattr__(self, "statistics", tuple(self.statistics))
        if len(self.statistics) < 2:
            raise ConfigError("a statistic pool needs at least two arms")
        ids = [s.id for s in self.statistics]
        if len(set(ids)) != len(ids):
            raise ConfigError("statistic ids within a pool must be distinct")

    @property
    def K(self) -> int:
        return len(self.statistics)

    def ids(self) -> tuple:
        return tuple(s.id for s in self.statistics)

    def __len__(self):
        return len(self.statistics)

    def __iter__(self):
        return iter(self.statistics)

    def __getitem__(self, i):
        return self.statistics[i]


def _series(y) -> np.ndarray:
    values = getattr(y, "values", y)
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or len(values) == 0:
        raise ConfigError("expected a non-empty 1-d series")
    return values


def _eval_moment(x: np.ndarray, params: Mapping) -> float:
    which = params["statistic"]
    if which == "mean":
        return float(np.mean(x))
    if which == "variance":
        return float(np.var(x))
    if which == "abs_energy":
        return float(np.dot(x, x))
    d = x - np.mean(x)
    m2 = float(np.mean(d * d))
    if which == "skewness":
        return float(np.mean(d**3) / m2**1.5) if m2 > 0 else 0.0
    if which == "kurtosis":
        # excess kurtosis, zero for a Gaussian
        return float(np.mean(d**4) / m2**2 - 3.0) if m2 > 0 else 0.0
    raise ConfigError(f"unknown moment statistic {which!r}")


def _eval_quantile(x: np.ndarray, params: Mapping) -> float:
    q = float(params["q"])
    if not 0.0 <= q <= 1.0:
        raise ConfigError(f"quantile level must lie in [0, 1], got {q}")
    return float(np.quantile(x, q))


def _eval_autocorrelation(x: np.ndarray, params: Mapping) -> float:
    lag = int(params["lag"])
    if lag < 1:
        raise ConfigError("autocorrelation lag must be at least 1")
    n = len(x)
    if lag >= n:
        return 0.0
    v = float(np.var(x))
    if v == 0.0:
        return 0.0
    d = x - np.mean(x)
    return float(np.dot(d[:-lag], d[lag:]) / ((n - lag) * v))


def _eval_spectral(x: np.ndarray, params: Mapping) -> float:
    b = int(params["bin"])
    part = params["part"]
    if b < 0:
        raise ConfigError("FFT bin must be non-negative")
    if part not in ("abs", "angle"):
        raise ConfigError(f"unknown FFT part {part!r}")
    spectrum = np.fft.rfft(x)
    if b >= len(spectrum):
        return 0.0
    coeff = spectrum[b]
    return float(np.abs(coeff)) if part == "abs" else float(np.angle(coeff))


def _eval_mass_quantile(x: np.ndarray, params: Mapping) -> float:
    q = float(params["q"])
    if not 0.0 < q <= 1.0:
        raise ConfigError(f"mass quantile level must lie in (0, 1], got {q}")
    mass = np.abs(x)
    total = float(mass.sum())
    if total <= 0.0:
        return 0.0
    cum = np.cumsum(mass)
    idx = int(np.searchsorted(cum, q * total, side="left"))
    idx = min(idx, len(x) - 1)  # guards cumsum round-off at q == 1
    return (idx + 1) / len(x)


def _longest_run(mask: np.ndarray) -> int:
    best = 0
    for key, group in itertools.groupby(mask):
        if key:
            best = max(best, sum(1 for _ in group))
    return best


def _eval_count(x: np.ndarray, params: Mapping) -> float:
    feature = params["feature"]
    if feature == "peaks":
        support = int(params["support"])
        if support < 1:
            raise ConfigError("peak support must be at least 1")
        n = len(x)
        if n <= 2 * support:
            return 0.0
        core = x[support : n - support]
        ok = np.ones(len(core), dtype=bool)
        for k in range(1, support + 1):
            ok &= core > x[support - k : n - support - k]
            ok &= core > x[support + k : n - support + k]
        return float(np.count_nonzero(ok))
    if feature == "strike_above":
        return float(_longest_run(x > np.mean(x)))
    if feature == "strike_below":
        return float(_longest_run(x < np.mean(x)))
    raise ConfigError(f"unknown count feature {feature!r}")


def _eval_complexity(x: np.ndarray, params: Mapping) -> float:
    feature = params["feature"]
    if feature == "mean_abs_change":
        return float(np.mean(np.abs(np.diff(x)))) if len(x) > 1 else 0.0
    if feature == "abs_sum_changes":
        return float(np.sum(np.abs(np.diff(x))))
    if feature == "cid_ce":
        if params.get("normalize", False):
            s = float(np.std(x))
            if s == 0.0:
                return 0.0
            x = (x - np.mean(x)) / s
        d = np.diff(x)
        return float(np.sqrt(np.dot(d, d)))
    if feature == "binned_entropy":
        bins = int(params["bins"])
        if bins < 1:
            raise ConfigError("binned entropy needs at least one bin")
        hist, _ = np.histogram(x, bins=bins)
        p = hist[hist > 0] / len(x)
        return float(-(p * np.log(p)).sum())
    raise ConfigError(f"unknown complexity feature {feature!r}")


_EVALUATORS = {
    "moment": _eval_moment,
    "quantile": _eval_quantile,
    "autocorrelation": _eval_autocorrelation,
    "spectral": _eval_spectral,
    "mass-quantile": _eval_mass_quantile,
    "count": _eval_count,
    "complexity": _eval_complexity,
}


def evaluate(stat: SummaryStatistic, y) -> float:
    """Evaluate one statistic on a trajectory or raw value array."""
    x = _series(y)
    try:
        result = float(_EVALUATORS[stat.family](x, stat.params))
    except KeyError as exc:
        raise ConfigError(f"statistic {stat.id!r} is missing parameter {exc}") from exc
    return result if np.isfinite(result) else 0.0


def evaluate_pool(pool: StatisticPool, y) -> np.ndarray:
    """Evaluate every statistic in the pool; element i is evaluate(pool[i], y)."""
    return np.array([evaluate(stat, y) for stat in pool], dtype=np.float64)


def statistic_to_dict(stat: SummaryStatistic) -> dict:
    return {"id": stat.id, "family": stat.family, "params": dict(stat.params)}


def statistic_from_dict(data: Mapping) -> SummaryStatistic:
    return SummaryStatistic(
        id=data["id"], family=data["family"], params=dict(data.get("params") or {})
    )
