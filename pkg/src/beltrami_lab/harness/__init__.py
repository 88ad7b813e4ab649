"""Experiment harness: configs, suites, reports and the CLI."""

from .config import EXPERIMENTS, ExperimentConfig, default_config, load_config
from .report import Check, Report, emit_report, load_report
from .suites import (
    SUITES,
    run_caccioppoli,
    run_counterexample,
    run_domain_suite,
    run_identity_suite,
    run_resolvent_growth,
    run_weight_scaling,
)

__all__ = [
    "EXPERIMENTS", "ExperimentConfig", "default_config", "load_config", "Check", "Report", "emit_report",
    "load_report", "SUITES", "run_caccioppoli", "run_counterexample", "run_domain_suite", "run_identity_suite",
    "run_resolvent_growth", "run_weight_scaling",
]
