"""Sparse data curation: maximum-entropy and baseline subsampling."""

from ._curator import (
    ConfigError,
    InvariantError,
    IoError,
    adjacency_matrix,
    allocate_counts,
    cost_estimate,
    kl_divergence,
    points_for_rate,
    run_cli,
    select_hypercubes_maxent,
    select_maxent_points,
    select_random,
    select_uips,
    subsample,
    temporal_select,
)

__all__ = [
    "ConfigError",
    "InvariantError",
    "IoError",
    "adjacency_matrix",
    "allocate_counts",
    "cost_estimate",
    "kl_divergence",
    "points_for_rate",
    "run_cli",
    "select_hypercubes_maxent",
    "select_maxent_points",
    "select_random",
    "select_uips",
    "subsample",
    "temporal_select",
]
