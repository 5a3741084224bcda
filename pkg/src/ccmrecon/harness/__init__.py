"""Scenario configuration, Monte Carlo trials and sweeps."""

from .config import METHODS, ConfigError, ScenarioConfig, UserSpec, from_dict, load_config
from .metrics import efficiency, nmse
from .sweep import CSV_HEADER, MetricsRecord, SweepPoint, csv_text, run_sweep, run_trials, write_csv
from .trial import METRICS, TrialError, TrialResult, run_trial

__all__ = [
    "CSV_HEADER", "ConfigError", "METHODS", "METRICS", "MetricsRecord", "ScenarioConfig", "SweepPoint",
    "TrialError", "TrialResult", "UserSpec", "csv_text", "efficiency", "from_dict", "load_config", "nmse",
    "run_sweep", "run_trial", "run_trials", "write_csv",
]
