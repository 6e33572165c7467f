"""Clustering MILP: model assembly, built-in solver and MPS interchange."""
from .bnb import BranchAndBound, MilpSolution, ScipyBackend, extract_partition, solve
from .problem import (
    MilpProblem,
    RobustProblem,
    SizeLimits,
    build_base,
    deterministic_objective,
    expected_shape,
    compact_row_count,
    robust_counterpart,
    stochastic_objective,
    stochastic_weights,
)

__all__ = [
    "BranchAndBound", "MilpSolution", "ScipyBackend", "extract_partition", "solve",
    "MilpProblem", "RobustProblem", "SizeLimits", "build_base", "deterministic_objective",
    "expected_shape", "compact_row_count", "robust_counterpart", "stochastic_objective",
    "stochastic_weights",
]
