from .statistics import (
    FAMILIES,
    StatisticPool,
    SummaryStatistic,
    evaluate,
    evaluate_pool,
    statistic_from_dict,
    statistic_to_dict,
)
from .catalog import catalog_to_json, full_catalog, save_catalog, standard_pool

__all__ = [
    "FAMILIES",
    "StatisticPool",
    "SummaryStatistic",
    "evaluate",
    "evaluate_pool",
    "statistic_from_dict",
    "statistic_to_dict",
    "catalog_to_json",
    "full_catalog",
    "save_catalog",
    "standard_pool",
]
