"""Exact spectral moments of distance k-graphs of Cartesian powers."""

__version__ = "0.1.0"

from .graphs import Graph, GraphError, mean_degree, named_family, parse_family, parse_graph
from .hermite import gaussian_moment, hermite_power_expectation, limit_moment, monic_hermite
from .moments import (
    MomentResult,
    Partition,
    moment_B,
    moment_distance_k,
    moment_elementary,
    moment_partition,
    moment_z,
    partitions,
)

__all__ = [
    "Graph",
    "GraphError",
    "MomentResult",
    "Partition",
    "gaussian_moment",
    "hermite_power_expectation",
    "limit_moment",
    "mean_degree",
    "moment_B",
    "moment_distance_k",
    "moment_elementary",
    "moment_partition",
    "moment_z",
    "monic_hermite",
    "named_family",
    "parse_family",
    "parse_graph",
    "partitions",
]
