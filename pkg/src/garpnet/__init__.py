"""Revealed-preference types, co-typing networks and covariate tests."""

from .covtests import (
    CovariateTable,
    MetricResult,
    effect_size_table,
    metric_community_C,
    metric_degree_D,
    metric_entropy_H,
    metric_pairwise_R,
    permutation_test,
)
from .data import Dataset, InputError, Observation, PrecisionAssignment, read_covariates_csv, read_observations_csv
from .datagen import SimConfig, simulate_population
from .ls import FeasibilityOracle, LsProblem, LsSolution, solve_ls_bruteforce, solve_ls_exact
from .milp import build_milp, export_milp
from .netmetrics import CommunityAssignment, NetworkStats, detect_communities, modularity, network_stats
from .partition import Partition, co_type_indicator, partition_greedy, partition_minimum
from .relations import (
    GarpResult,
    RelationGraph,
    ViolationCycle,
    build_relations,
    enumerate_violating_cycles,
    garp_check,
)
from .simnet import SamplingPlan, SimilarityMatrix, ThresholdNetwork, compute_similarity, draw_synthetic, threshold

__version__ = "0.1.0"

__all__ = [
    "CommunityAssignment",
    "CovariateTable",
    "Dataset",
    "FeasibilityOracle",
    "GarpResult",
    "InputError",
    "LsProblem",
    "LsSolution",
    "MetricResult",
    "NetworkStats",
    "Observation",
    "Partition",
    "PrecisionAssignment",
    "RelationGraph",
    "SamplingPlan",
    "SimConfig",
    "SimilarityMatrix",
    "ThresholdNetwork",
    "ViolationCycle",
    "build_milp",
    "build_relations",
    "co_type_indicator",
    "compute_similarity",
    "detect_communities",
    "draw_synthetic",
    "effect_size_table",
    "enumerate_violating_cycles",
    "export_milp",
    "garp_check",
    "metric_community_C",
    "metric_degree_D",
    "metric_entropy_H",
    "metric_pairwise_R",
    "modularity",
    "network_stats",
    "partition_greedy",
    "partition_minimum",
    "permutation_test",
    "read_covariates_csv",
    "read_observations_csv",
    "simulate_population",
    "solve_ls_bruteforce",
    "solve_ls_exact",
    "threshold",
]
