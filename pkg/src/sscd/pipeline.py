"""End-to-end SSCD: standardise, featurise, compress, build the pair graph, fit."""
from __future__ import annotations

from dataclasses import dataclass

from .histfeat import DEFAULT_BOUND, DEFAULT_D_TARGET, DEFAULT_H, pair_features, pca_reduce, standardize_truncate
from .laprls import DEFAULT_LAMBDA, FitResult, LaplacianSystem, fit, normalized_laplacian
from .pairmetric import median_heuristic_sigma, pair_distance_matrix, similarity_matrix
from .pairspace import DataMatrix, LabelAssignment


@dataclass(frozen=True)
class PairGraph:
    laplacian: LaplacianSystem
    sigma: float
    d: int


def build_pair_graph(X: DataMatrix, h: float = DEFAULT_H, bound: float = DEFAULT_BOUND,
                     d_target: int | None = DEFAULT_D_TARGET, sigma: float | None = None) -> PairGraph:
    """Label-independent part of the pipeline; reuse it across label draws.

    ``d_target=None`` skips PCA and measures distances on the raw grids.
    ``sigma=None`` selects the median heuristic.
    """
    F = pair_features(standardize_truncate(X, bound), h, bound)
    if d_target is not None:
        F = pca_reduce(F, d_target)
    D = pair_distance_matrix(F)
    if sigma is None:
        sigma = median_heuristic_sigma(D)
    W = similarity_matrix(D, sigma)
    return PairGraph(normalized_laplacian(W), float(sigma), F.d)


def sscd_fit(X: DataMatrix, labels: LabelAssignment, lam: float = DEFAULT_LAMBDA, h: float = DEFAULT_H,
             bound: float = DEFAULT_BOUND, d_target: int | None = DEFAULT_D_TARGET,
             sigma: float | None = None) -> FitResult:
    g = build_pair_graph(X, h, bound, d_target, sigma)
    return fit(g.laplacian, labels, lam, sigma=g.sigma)
