"""Utility bounds and experiment sweeps."""

from privebc.analysis.bounds import (
    quality_error_bound,
    relative_error,
    sparse_regime_confidence,
    required_budget,
    threshold_for_probability,
    utility_bound_probability,
)
from privebc.analysis.harness import (
    ExperimentSpec,
    Row,
    rows_csv,
    run_sweep,
    summarize,
    summary_csv,
)

__all__ = [
    "ExperimentSpec", "Row", "quality_error_bound", "relative_error", "sparse_regime_confidence",
    "required_budget", "rows_csv", "run_sweep", "summarize", "summary_csv",
    "threshold_for_probability", "utility_bound_probability",
]
