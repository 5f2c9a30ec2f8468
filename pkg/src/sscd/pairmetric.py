"""Distances and RBF similarities between variable pairs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import GridError, KindError, ParamError
from .histfeat import PCA, RAW, HistogramDensity, PairFeatureMatrix

EXACT_HISTOGRAM_L2 = "exact_histogram_l2"
PCA_EUCLIDEAN = "pca_euclidean"


@dataclass(frozen=True)
class DistanceMatrix:
    d: np.ndarray
    metric_kind: str

    @property
    def m(self) -> int:
        return self.d.shape[0]


@dataclass(frozen=True)
class SimilarityMatrix:
    W: np.ndarray
    sigma: float


def density_l2_distance(kappa1: HistogramDensity, kappa2: HistogramDensity) -> float:
    """L2 distance between two histogram densities on the same grid.

    Both densities are constant on bins of area ``h**2``, so the integral
    reduces to ``||mass1 - mass2|| / h``.
    """
    if not kappa1.same_grid(kappa2):
        raise GridError("histograms are defined on different grids")
    return float(np.linalg.norm((kappa1.mass - kappa2.mass).ravel()) / kappa1.h)


def pair_distance_matrix(F: PairFeatureMatrix) -> DistanceMatrix:
    """All pairwise distances between feature rows, scaled by ``1/h``.

    For raw rows this is the exact L2 distance between histogram densities;
    for PCA rows it is the same quantity measured in the retained subspace.
    """
    kind = {RAW: EXACT_HISTOGRAM_L2, PCA: PCA_EUCLIDEAN}.get(F.kind)
    if kind is None:
        raise KindError(f"unknown feature kind {F.kind!r}")
    if F.m < 2:
        return DistanceMatrix(np.zeros((F.m, F.m)), kind)
    d = squareform(pdist(F.features, "euclidean")) / F.h
    return DistanceMatrix(d, kind)


def median_heuristic_sigma(D: DistanceMatrix) -> float:
    """Median of the off-diagonal distances, with fallbacks for degenerate inputs."""
    d = np.asarray(D.d if isinstance(D, DistanceMatrix) else D)
    off = d[np.triu_indices(d.shape[0], k=1)]
    if off.size == 0:
        return 1.0
    med = float(np.median(off))
    if med > 0:
        return med
    pos = off[off > 0]
    return float(pos.min()) if pos.size else 1.0


def similarity_matrix(D: DistanceMatrix, sigma: float) -> SimilarityMatrix:
    if not sigma > 0:
        raise ParamError(f"sigma must be positive, got {sigma}")
    d = np.asarray(D.d if isinstance(D, DistanceMatrix) else D)
    W = np.exp(-(d**2) / (2.0 * sigma**2))
    return SimilarityMatrix(W, float(sigma))
