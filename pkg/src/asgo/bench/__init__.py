"""Experiment harness: configs, seeded runs, comparisons, sweeps and verification suites."""
from asgo.bench.config import ConfigError, ExperimentConfig, Schedule, from_dict, load
from asgo.bench.experiments import compare, sweep
from asgo.bench.runner import COLUMNS, RunRecord, lr_at, run_all, run_seed, write_records
from asgo.bench.verify import SUITES, run_suite

__all__ = [
    "COLUMNS",
    "ConfigError",
    "ExperimentConfig",
    "RunRecord",
    "SUITES",
    "Schedule",
    "compare",
    "from_dict",
    "load",
    "lr_at",
    "run_all",
    "run_seed",
    "run_suite",
    "sweep",
    "write_records",
]
