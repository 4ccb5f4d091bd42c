"""Hypergraph mining via a resource-allocation proximity matrix.

Pipelines: hyperedge prediction, spectral community detection, vital-node
ranking, and a nonlinear SIR spreading simulator used as the influence
ground truth, plus the closed-form benchmarks and evaluation metrics.
"""

from ._kernels import BACKEND as kernel_backend
from .community import (
    Partition,
    hra_cd_partition,
    hsc_partition,
    ndp_louvain_partition,
    nmf_partition,
    precision,
)
from .hypercore import (
    CommunityLabels,
    DatasetError,
    Hypergraph,
    clique_adjacency,
    connected_components,
    load_hyperedge_list,
    load_labels,
    load_simplicial_triple,
    weighted_adjacency,
    write_hyperedge_list,
)
from .linkpred import (
    CandidateSet,
    FoldSplit,
    cn_similarity,
    hpra_similarity,
    katz_similarity,
    kfold_split,
    run_linkpred_experiment,
    sample_negative,
    score_candidate,
)
from .metrics import ScoredSample, auc, kendall_tau, ndcg
from .proximity import (
    ProximityMatrix,
    SimilarityMatrix,
    ablation_source,
    incidence_proximity,
    proximity_matrix,
    similarity_matrix,
    stationary_proximity,
    transition_matrix,
)
from .spreading import (
    SirConfig,
    SirOutcome,
    estimate_threshold,
    evaluate_centrality_vs_influence,
    node_influence,
    node_influence_samples,
    simulate_sir,
)
from .vitality import (
    CentralityVector,
    hdc_centrality,
    hec_centrality,
    hra_centrality,
    katz_centrality,
    nb_centrality,
    shc_centrality,
)

__version__ = "0.1.0"
