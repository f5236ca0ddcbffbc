"""Random-walk graph embeddings (Walk2Vec, Walk2Vec-SC) and the phase-
transition experiment harness built around them."""

__version__ = "0.1.0"

from .graph import (
    Graph,
    clustering_coefficients,
    degrees,
    from_edge_list,
    is_connected,
    pagerank,
    permute,
    read_edge_list,
    write_edge_list,
)
from .generators import (
    GenerationError,
    ModelParams,
    gen_er,
    gen_planted_clique,
    gen_sbm,
    planted_clique_nodes,
    sbm_params_from,
)
from .walks import (
    DegreeLandmarks,
    WalkTrajectory,
    delta_distribution,
    distance_matrix,
    ego_uniform_distribution,
    feature_dim,
    landmark_keys_unique,
    node_walk_features,
    select_degree_landmarks,
    similarity_matrix,
    stationary_distribution,
    transition_step,
    walk_feature,
    walk_trajectory,
)
from .sparse_coding import (
    Dictionary,
    dict_learn,
    lasso,
    lasso_objective,
    load_dictionary,
    save_dictionary,
    sparse_encode,
)
from .embedding import (
    Walk2VecEmbedding,
    Walk2VecSCEmbedding,
    embed_sc,
    embed_walk2vec,
    pool,
)
from .forest import RandomForest, auc
from .topo import TopologicalEmbedding, betweenness_centrality, topo_features
from .experiments import (
    CellResult,
    ExperimentGrid,
    beta_crit,
    delta_crit,
    pca_2d,
    run_cell,
    run_grid,
    write_pca_csv,
    write_results_csv,
)
