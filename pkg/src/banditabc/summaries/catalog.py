"""The statistic catalog and pool construction.

The catalog enumerates every statistic the package knows how to compute,
in a fixed order.  Pools are drawn from it uniformly without replacement
and kept in catalog order, so the same (size, seed) pair always yields
the same pool and drawing the full catalog size returns the catalog
itself.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from .statistics import StatisticPool, SummaryStatistic, statistic_to_dict

_ACF_MAX_LAG = 50
_FFT_BINS = 64
_catalog_cache = None


def _build_catalog() -> tuple:
    stats = []

    for which in ("mean", "variance", "skewness", "kurtosis", "abs_energy"):
        stats.append(SummaryStatistic(f"moment_{which}", "moment", {"statistic": which}))

    stats.append(SummaryStatistic("quantile_min", "quantile", {"q": 0.0}))
    stats.append(SummaryStatistic("quantile_max", "quantile", {"q": 1.0}))
    stats.append(SummaryStatistic("quantile_median", "quantile", {"q": 0.5}))
    for q in (0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9):
        stats.append(SummaryStatistic(f"quantile_q{q:.2f}", "quantile", {"q": q}))

    for lag in range(1, _ACF_MAX_LAG + 1):
        stats.append(SummaryStatistic(f"acf_lag{lag}", "autocorrelation", {"lag": lag}))

    for b in range(_FFT_BINS):
        stats.append(SummaryStatistic(f"fft_abs_b{b}", "spectral", {"bin": b, "part": "abs"}))
    for b in range(_FFT_BINS):
        stats.append(SummaryStatistic(f"fft_angle_b{b}", "spectral", {"bin": b, "part": "angle"}))

    for q in (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9):
        stats.append(SummaryStatistic(f"mass_quantile_q{q:.2f}", "mass-quantile", {"q": q}))

    for support in (1, 3, 5):
        stats.append(
            SummaryStatistic(f"count_peaks_s{support}", "count", {"feature": "peaks", "support": support})
        )
    stats.append(SummaryStatistic("count_strike_above", "count", {"feature": "strike_above"}))
    stats.append(SummaryStatistic("count_strike_below", "count", {"feature": "strike_below"}))

    stats.append(SummaryStatistic("cx_mean_abs_change", "complexity", {"feature": "mean_abs_change"}))
    stats.append(SummaryStatistic("cx_abs_sum_changes", "complexity", {"feature": "abs_sum_changes"}))
    stats.append(SummaryStatistic("cx_cid_ce", "complexity", {"feature": "cid_ce", "normalize": False}))
    stats.append(
        SummaryStatistic("cx_cid_ce_norm", "complexity", {"feature": "cid_ce", "normalize": True})
    )
    for bins in (5, 10):
        stats.append(
            SummaryStatistic(f"cx_binned_entropy_b{bins}", "complexity", {"feature": "binned_entropy", "bins": bins})
        )

    return tuple(stats)


def full_catalog() -> tuple:
    """All known statistics in fixed order."""
    global _catalog_cache
    if _catalog_cache is None:
        _catalog_cache = _build_catalog()
    return _catalog_cache


def standard_pool(size: int, seed: int) -> StatisticPool:
    """Draw ``size`` distinct statistics from the catalog, uniformly, seeded.

    The draw is without replacement and the result keeps catalog order.
    """
    catalog = full_catalog()
    if not 2 <= size <= len(catalog):
        raise ConfigError(
            f"pool size must lie in [2, {len(catalog)}], got {size}"
        )
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(len(catalog), size=size, replace=False))
    return StatisticPool(tuple(catalog[i] for i in idx))


def catalog_to_json(statistics=None) -> list:
    """JSON-ready list of statistic definitions (defaults to the full catalog)."""
    if statistics is None:
        statistics = full_catalog()
    return [statistic_to_dict(s) for s in statistics]


def save_catalog(path, statistics=None) -> None:
    Path(path).write_text(json.dumps(catalog_to_json(statistics), indent=2) + "\n")
