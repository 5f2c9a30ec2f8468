"""Laplacian-regularised least squares over the graph of variable pairs.

The fitted label function ``F`` (``m x 2``, columns non-causal / causal)
minimises::

    (1/m_L) * sum_{k in L} ||F_k - Y_k||^2  +  (lam / m^2) * tr(F^T L F)

with ``L`` the symmetric normalised graph Laplacian of the similarity matrix.
Setting the gradient to zero gives the linear system::

    (J + gamma * L) F = J Y,        gamma = lam * m_L / m^2

where ``J`` selects labelled rows. A small ridge keeps the system positive
definite when some graph component carries no label.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegreeError, NoLabels, ParamError, SolveError
from .pairmetric import SimilarityMatrix
from .pairspace import LabelAssignment

DEFAULT_LAMBDA = 0.001
LAMBDA_GRID = (0.001, 0.01, 0.1, 1.0)
RIDGE = 1e-8


@dataclass(frozen=True)
class LaplacianSystem:
    L: np.ndarray
    degrees: np.ndarray

    @property
    def m(self) -> int:
        return self.L.shape[0]


@dataclass(frozen=True)
class FitResult:
    f: np.ndarray
    lam: float
    sigma: float | None = None
    labelled: np.ndarray | None = None

    # signed scores already encode the class; rank them as they are
    use_absolute = False

    @property
    def scores(self) -> np.ndarray:
        return self.f[:, 1] - self.f[:, 0]

    @property
    def predictions(self) -> np.ndarray:
        return (self.scores > 0).astype(np.int8)


def normalized_laplacian(W) -> LaplacianSystem:
    """``I - D^{-1/2} W D^{-1/2}`` with ``D`` the row sums of ``W`` (diagonal included)."""
    W = np.asarray(W.W if isinstance(W, SimilarityMatrix) else W, dtype=float)
    deg = W.sum(axis=1)
    if np.any(deg <= 0):
        raise DegreeError(f"{int(np.sum(deg <= 0))} row(s) of W have zero degree")
    s = 1.0 / np.sqrt(deg)
    L = np.eye(W.shape[0]) - s[:, None] * W * s[None, :]
    L = 0.5 * (L + L.T)
    return LaplacianSystem(L, deg)


def fit(L_sys: LaplacianSystem, labels: LabelAssignment, lam: float = DEFAULT_LAMBDA,
        sigma: float | None = None, ridge: float = RIDGE) -> FitResult:
    """Closed-form minimiser of the regularised objective.

    Each label column is solved separately against one Cholesky factor, so
    exchanging the two label classes exchanges the two columns of ``f``
    bit for bit.
    """
    m = L_sys.m
    if labels.m != m:
        raise ValueError(f"labels cover {labels.m} pairs, Laplacian has {m}")
    if lam < 0:
        raise ParamError(f"lambda must be non-negative, got {lam}")
    m_L = labels.m_L
    if m_L == 0:
        raise NoLabels("no labelled pairs")
    Y = labels.one_hot()
    sel = (labels.states >= 0).astype(float)
    gamma = lam * m_L / m**2
    A = gamma * L_sys.L
    A[np.diag_indices(m)] += sel + ridge
    try:
        factor = scipy.linalg.cho_factor(A, lower=True, check_finite=False)
        f = np.column_stack([scipy.linalg.cho_solve(factor, Y[:, c], check_finite=False) for c in (0, 1)])
    except np.linalg.LinAlgError as exc:
        raise SolveError(f"system not positive definite: {exc}") from None
    if not np.all(np.isfinite(f)):
        raise SolveError("non-finite solution")
    return FitResult(f, float(lam), sigma, labels.labelled)


def objective_value(F, L_sys: LaplacianSystem, labels: LabelAssignment, lam: float) -> float:
    F = np.asarray(F, dtype=float)
    lab = labels.labelled
    loss = np.sum((F[lab] - labels.one_hot()[lab]) ** 2) / max(len(lab), 1)
    smooth = np.trace(F.T @ L_sys.L @ F) * lam / L_sys.m**2
    return float(loss + smooth)


def objective_gradient(F, L_sys: LaplacianSystem, labels: LabelAssignment, lam: float) -> np.ndarray:
    F = np.asarray(F, dtype=float)
    sel = (labels.states >= 0)[:, None]
    return 2.0 * sel * (F - labels.one_hot()) / labels.m_L + 2.0 * lam / L_sys.m**2 * (L_sys.L @ F)
