"""Experiment runner, report format and CLI."""

from .experiments import EXPERIMENTS, ConfigError, run_experiment
from .reports import GoldenDiff, Report, ReportRow, golden_check, write_report

__all__ = [
    "EXPERIMENTS", "ConfigError", "GoldenDiff", "Report", "ReportRow",
    "golden_check", "run_experiment", "write_report",
]
