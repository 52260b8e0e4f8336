"""Role similarity on undirected graphs: RoleSim, Iceberg RoleSim, baselines."""

__version__ = "0.1.0"

from .baselines import BaselineConfig, evidence, psimrank, simrank, simrank_pp
from .core import (
    ALL1,
    DEGREE_BINARY,
    DEGREE_RATIO,
    IterationReport,
    RoleSimConfig,
    SimilarityMatrix,
    compute_rolesim,
    generalized_jaccard,
    initialize,
    pair_update,
    read_matrix,
    write_matrix,
)
from .equivalence import (
    BINARY,
    COUNTED,
    automorphism_orbits_bruteforce,
    degree_seed,
    is_equitable,
    is_regular,
    refine_partition,
    structural_classes,
)
from .evaluate import (
    AxiomReport,
    check_axioms,
    pearson,
    percentile_ranks,
    topk_pairs,
    within_block_avg_rank,
)
from .graph import (
    BlockSpec,
    Graph,
    Partition,
    generate_block_model,
    generate_scale_free,
    k_shell_decomposition,
    parse_edge_list,
    random_block_spec,
    read_graph,
    write_graph,
)
from .iceberg import (
    IcebergConfig,
    IcebergTable,
    compute_iceberg,
    estimate_noncandidate,
    seed_candidates,
    theta_upper_bound,
)
from .matching import MatchResult, exact_matching, greedy_matching
