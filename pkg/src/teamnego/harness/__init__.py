"""Scenario sampling, experiment grids, metrics, and the command line."""

from .scenarios import IntLaw, Law, ScenarioDistribution, generate_scenario
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    ExperimentResult,
    default_config,
    run_cell,
    run_one,
)
from .metrics import CellAccumulator, CurveRow, MetricsRow, write_curves_csv, write_metrics_csv

__all__ = [
    "CellAccumulator",
    "CurveRow",
    "EXPERIMENTS",
    "ExperimentConfig",
    "ExperimentResult",
    "IntLaw",
    "Law",
    "MetricsRow",
    "ScenarioDistribution",
    "default_config",
    "generate_scenario",
    "run_cell",
    "run_one",
    "write_curves_csv",
    "write_metrics_csv",
]
