"""Bound evaluators, rate comparisons and inequality suites."""
from asgo.theory.bounds import (
    BoundReport,
    check_muon_rate,
    check_smooth,
    corollary_bound,
    muon_rate_bound,
    nonsmooth_bound,
    smooth_bound,
)
from asgo.theory.comparison import comparison_chain, rate_comparison_instance
from asgo.theory.lemmas import LemmaManifest, LemmaResult, batch_variance_check, lemma_suite
from asgo.theory.probe import epsilon_sensitivity_probe
from asgo.theory.trajectory import TrajectoryStats, simulate, two_phase_run

__all__ = [
    "BoundReport",
    "LemmaManifest",
    "LemmaResult",
    "TrajectoryStats",
    "batch_variance_check",
    "check_muon_rate",
    "check_smooth",
    "comparison_chain",
    "corollary_bound",
    "epsilon_sensitivity_probe",
    "lemma_suite",
    "muon_rate_bound",
    "nonsmooth_bound",
    "rate_comparison_instance",
    "simulate",
    "smooth_bound",
    "two_phase_run",
]
