"""
Experiment runner: one seeded subcommand per verification family, CSV reports.
"""

from .cli import ExperimentCLI, main
from .experiments import EXPERIMENTS, ExperimentOutcome, run_experiment
from .report_io import COLUMNS, read_report, write_report
from .schemas import SUBCOMMANDS, ExperimentConfig

__all__ = [
    "ExperimentCLI",
    "main",
    "EXPERIMENTS",
    "ExperimentOutcome",
    "run_experiment",
    "COLUMNS",
    "read_report",
    "write_report",
    "SUBCOMMANDS",
    "ExperimentConfig",
]
