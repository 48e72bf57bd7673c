"""Exact partition-diagram moments and cumulants of generalized U-statistics,
with Monte Carlo subgraph counting in binomial random-connection models."""

from .bounds import (
    RegimeClassification,
    StatuleviciusFit,
    classify_regime,
    fit_statulevicius,
    kernel_cumulant_bound,
    normalized_cumulant_bound_sq,
    pointwise_regime,
    regime_bound,
    statulevicius_constants,
    statulevicius_form_bound_sq,
    subgraph_cumulant_bound,
    variance_floor,
)
from .errors import (
    ContractionError,
    CriticalRegimeError,
    DegenerateSampleError,
    SizeLimitError,
)
from .exact import (
    CumulantReport,
    FiniteModelSpec,
    SubgraphKernelSpec,
    VarianceDecomposition,
    brute_force_moment,
    cumulant_report,
    linear_projection_variance,
    marginal,
    mean_subgraph_count,
    model_from_json,
    model_to_json,
    moment,
    moments_to_cumulants,
    rational,
    v_statistic_moment,
    variance_decomposition,
    vertex_model,
)
from .motifs import (
    ContractionResult,
    DiagramPoint,
    MotifGraph,
    automorphism_count,
    contract,
    contraction_profile,
    deficiency_diagram,
    is_strongly_balanced,
    min_edge_count,
    motif,
    motif_from_edge_list,
    on_upper_hull,
    upper_hull,
)
from .partitions import (
    IndexMatrix,
    Partition,
    bell_number,
    count_index_matrices,
    count_maximal_cnf,
    enumerate_cnf,
    enumerate_partitions,
    falling_factorial,
    partition_of_index_matrix,
)
from .simulate import (
    AdjacencyGraph,
    ConstantConnection,
    CountSample,
    ExpDecay,
    ExperimentConfig,
    ExperimentResult,
    FiniteMarks,
    HardBall,
    RcmSpec,
    TableConnection,
    UniformCube,
    count_subgraphs,
    ks_distance_to_normal,
    replicate_seed,
    run_experiment,
    run_replicates,
    sample_cumulants,
    sample_graph,
    threshold_experiment,
    wilson_interval,
)

__version__ = "0.1.0"
