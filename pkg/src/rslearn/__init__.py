"""
RSLearn: recursive structure learning of Bayesian networks.

Learns the skeleton and separating sets of a DAG from conditional
independence tests by repeatedly removing a removable vertex, under either a
bound on the clique number or a diamond-freeness assumption.
"""

from .ci import (
    CiQuery,
    CiStats,
    CountingTester,
    FisherZTester,
    GaussianDataset,
    OracleTester,
    counting_tester,
    fisher_z_statistic,
    fisher_z_test,
    oracle_test,
)
from .evaluate import SkeletonReport, alss, score_sepsets, score_skeleton
from .graph import (
    Dag,
    Skeleton,
    VertexSubset,
    clique_number,
    d_separated,
    find_diamond,
    induced_subgraph,
    is_diamond_free,
    is_removable,
    structure_summary,
    true_mb,
    true_vstructures,
)
from .io import (
    fixture_path,
    list_fixtures,
    read_dataset,
    read_graph,
    read_result,
    write_dataset,
    write_graph,
    write_result,
)
from .mb import MbMap, compute_mb, update_mb
from .rsl import (
    Auto,
    BoundedClique,
    DiamondFree,
    LearnResult,
    SepSetMap,
    SideInfo,
    extract_vstructures,
    find_neighbors_d,
    find_neighbors_omega,
    find_removable_d,
    find_removable_omega,
    learn_auto,
    learn_structure,
    rsl_learn,
)
from .run_benchmark import BenchConfig, run_benchmark, run_learner
from .synth import SemModel, draw_sem, er_probability, erdos_renyi_dag, sample_sem, split_seed

__version__ = "0.1.0"

__all__ = [
    # ci
    "CiQuery",
    "CiStats",
    "CountingTester",
    "FisherZTester",
    "GaussianDataset",
    "OracleTester",
    "counting_tester",
    "fisher_z_statistic",
    "fisher_z_test",
    "oracle_test",
    # evaluate
    "SkeletonReport",
    "alss",
    "score_sepsets",
    "score_skeleton",
    # graph
    "Dag",
    "Skeleton",
    "VertexSubset",
    "clique_number",
    "d_separated",
    "find_diamond",
    "induced_subgraph",
    "is_diamond_free",
    "is_removable",
    "structure_summary",
    "true_mb",
    "true_vstructures",
    # io
    "fixture_path",
    "list_fixtures",
    "read_dataset",
    "read_graph",
    "read_result",
    "write_dataset",
    "write_graph",
    "write_result",
    # mb
    "MbMap",
    "compute_mb",
    "update_mb",
    # rsl
    "Auto",
    "BoundedClique",
    "DiamondFree",
    "LearnResult",
    "SepSetMap",
    "SideInfo",
    "extract_vstructures",
    "find_neighbors_d",
    "find_neighbors_omega",
    "find_removable_d",
    "find_removable_omega",
    "learn_auto",
    "learn_structure",
    "rsl_learn",
    # run_benchmark
    "BenchConfig",
    "run_benchmark",
    "run_learner",
    # synth
    "SemModel",
    "draw_sem",
    "er_probability",
    "erdos_renyi_dag",
    "sample_sem",
    "split_seed",
]
