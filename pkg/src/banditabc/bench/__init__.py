from .config import ExperimentConfig, MethodSettings, ObservedSpec, load_config
from .experiment import generate_observed, load_observed, run_experiment
from .report import ReportRow, aggregate_rows, load_report_rows, write_report

__all__ = [
    "ExperimentConfig",
    "MethodSettings",
    "ObservedSpec",
    "load_config",
    "generate_observed",
    "load_observed",
    "run_experiment",
    "ReportRow",
    "aggregate_rows",
    "load_report_rows",
    "write_report",
]
