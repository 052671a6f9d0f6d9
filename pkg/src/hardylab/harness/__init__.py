"""Configuration, experiment orchestration and report emission."""

from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .experiments import EXPERIMENTS, Context, run_all, run_experiment
from .report import Check, Record, Report

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config", "EXPERIMENTS",
           "Context", "run_all", "run_experiment", "Check", "Record", "Report"]
