"""Semi-supervised causal discovery: learn causal labels for variable pairs from
bivariate histogram features and a partially labelled causal adjacency matrix."""

__version__ = "0.1.0"

from .pairspace import DataMatrix, LabelAssignment, PairIndex, labels_from_adjacency, graph_from_labels, pair_index, pair_unindex
from .histfeat import histogram_estimate, pair_features, pca_reduce, standardize_truncate
from .pairmetric import density_l2_distance, median_heuristic_sigma, pair_distance_matrix, similarity_matrix
from .laprls import fit, normalized_laplacian, objective_value
from .pipeline import build_pair_graph, sscd_fit
from .evalx import auc, evaluate_on_unlabelled, run_experiment, ExperimentConfig
