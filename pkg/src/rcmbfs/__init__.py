"""Parallel graph traversal on bandwidth-reduced CSR graphs.

The package builds canonical CSR graphs from edge lists or a power-law
generator, relabels them with (optionally truncated) reverse Cuthill-McKee
to concentrate adjacency near the diagonal, and traverses them with a
direction-switching BFS whose bottom-up side can be load-balanced by work
stealing and thinned by a two-pass degree-aware kernel with partition
shrinking.  A five-rule validator checks every predecessor tree; the bench
module turns all of it into repeatable TEPS measurements.
"""

from .bench import (
    BenchSummary,
    PreparedRun,
    RunConfig,
    ValidationFailure,
    parse_reorder,
    prepare_run,
    run_benchmark,
    sweep,
)
from .bitmap import BLOCK_BITS, Bitmap, copy_blocks, or_blocks
from .engine import (
    BOTTOM_UP,
    MODES,
    TOP_DOWN,
    BfsEngine,
    BfsParams,
    BfsResult,
    Frontier,
    LevelRecord,
    PolicyCounters,
    StepStats,
    bfs_run,
    bfs_sequential,
    bottom_up_step,
    bottom_up_step_balanced,
    bottom_up_step_reduced,
    default_partition_factor,
    top_down_step,
    top_down_step_balanced,
    update_traversal_policy,
    write_level_trace,
)
from .generator import (
    DEFAULT_INITIATOR,
    KroneckerParams,
    generator_metadata,
    isolated_count,
    kronecker_generate,
    scramble_ids,
)
from .graph import (
    CsrGraph,
    EdgeList,
    bandwidth,
    build_csr,
    load_edge_list,
    neighbors,
    save_edge_list,
)
from .partition import PartitionSet, get_partitions, shrink_partition
from .reorder import (
    Permutation,
    RcmRunStats,
    apply_permutation,
    degree_sort_adjacency,
    graph_hash,
    load_permutation,
    partial_rcm,
    rcm,
    save_permutation,
)
from .validate import ValidationReport, Validator, validate

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # graph
    "EdgeList", "CsrGraph", "build_csr", "neighbors", "bandwidth",
    "load_edge_list", "save_edge_list",
    # bitmap
    "Bitmap", "BLOCK_BITS", "or_blocks", "copy_blocks",
    # generator
    "KroneckerParams", "kronecker_generate", "scramble_ids",
    "isolated_count", "generator_metadata", "DEFAULT_INITIATOR",
    # reorder
    "Permutation", "RcmRunStats", "rcm", "partial_rcm", "apply_permutation",
    "degree_sort_adjacency", "graph_hash", "save_permutation",
    "load_permutation",
    # partition
    "PartitionSet", "get_partitions", "shrink_partition",
    # engine
    "TOP_DOWN", "BOTTOM_UP", "MODES", "BfsParams", "Frontier", "StepStats",
    "LevelRecord", "BfsResult", "PolicyCounters", "update_traversal_policy",
    "default_partition_factor", "top_down_step", "top_down_step_balanced",
    "bottom_up_step", "bottom_up_step_balanced", "bottom_up_step_reduced",
    "bfs_sequential", "bfs_run", "BfsEngine", "write_level_trace",
    # validate
    "Validator", "ValidationReport", "validate",
    # bench
    "RunConfig", "PreparedRun", "BenchSummary", "ValidationFailure",
    "parse_reorder", "prepare_run", "run_benchmark", "sweep",
]
