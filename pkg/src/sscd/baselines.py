"""Reference pair scorers that ignore the label information.

Correlation scores are undirected: ``(i, j)`` and ``(j, i)`` share a value.
Lasso scores are directed: the score of ``(i, j)`` is the magnitude of the
coefficient of ``i`` when ``j`` is regressed on all other variables.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import lasso_path as _sk_lasso_path

from .errors import ConstantVariable, CvError
from .pairspace import DataMatrix, PairIndex

LASSO_TOL = 1e-10


@dataclass(frozen=True)
class ScoreTable:
    scores: np.ndarray
    method: str
    # ranked by magnitude: a strong negative coefficient is as suggestive as a positive one
    use_absolute: bool = True


def _check_nonconstant(X: DataMatrix):
    v = X.values
    const = [X.variable_names[c] for c in range(X.p) if np.all(v[:, c] == v[0, c])]
    if const:
        raise ConstantVariable(const)


def _symmetric_to_pairs(C: np.ndarray) -> np.ndarray:
    idx = PairIndex(C.shape[0])
    return C[idx.rows, idx.cols]


def pearson_scores(X: DataMatrix) -> ScoreTable:
    _check_nonconstant(X)
    C = np.corrcoef(X.values, rowvar=False)
    return ScoreTable(np.clip(_symmetric_to_pairs(C), -1.0, 1.0), "pearson")


# ---------------------------------------------------------------- Kendall

def _dense_rank(x: np.ndarray) -> np.ndarray:
    _, inv = np.unique(x, return_inverse=True)
    return inv.ravel()


def _tie_pairs(r: np.ndarray) -> int:
    t = np.bincount(r)
    return int(np.sum(t * (t - 1) // 2))


def count_inversions(r: np.ndarray) -> int:
    """Number of index pairs ``a < b`` with ``r[a] > r[b]`` (strict), for integer ranks.

    Bottom-up merge sort: at each level every block of ``2w`` holds two
    sorted runs, and each element of the right run counts the elements of
    its left run that exceed it. Keys are offset by block number so the
    counts for all blocks come from one ``searchsorted`` on the concatenated
    left runs.
    """
    r = np.asarray(r, dtype=np.int64)
    n = r.size
    if n < 2:
        return 0
    size = 1 << int(np.ceil(np.log2(n)))
    top = int(r.max()) + 1
    a = np.full(size, top, dtype=np.int64)  # padding sits at the tail and is never greater than anything
    a[:n] = r
    span = top + 1
    total = 0
    w = 1
    while w < size:
        blocks = a.reshape(-1, 2 * w)
        nblk = blocks.shape[0]
        off = (np.arange(nblk, dtype=np.int64) * span)[:, None]
        left = (blocks[:, :w] + off).ravel()
        right = blocks[:, w:] + off
        upper = np.searchsorted(left, (off + span).ravel(), side="left")
        le = np.searchsorted(left, right.ravel(), side="right").reshape(nblk, w)
        total += int(np.sum(upper[:, None] - le))
        a = np.sort(blocks, axis=1).ravel()
        w *= 2
    return total


def kendall_tau_b(x, y) -> float:
    """Tie-corrected Kendall rank correlation in ``O(n log n)``."""
    x = np.asarray(x)
    y = np.asarray(y)
    n = x.size
    rx, ry = _dense_rank(x), _dense_rank(y)
    order = np.lexsort((ry, rx))
    rx, ry = rx[order], ry[order]
    n0 = n * (n - 1) // 2
    n1 = _tie_pairs(rx)
    n2 = _tie_pairs(ry)
    joint = rx.astype(np.int64) * (int(ry.max()) + 1) + ry
    n3 = _tie_pairs(_dense_rank(joint))
    if n1 == n0 or n2 == n0:
        raise ConstantVariable(["<all-tied column>"])
    discordant = count_inversions(ry)
    num = n0 - n1 - n2 + n3 - 2 * discordant
    return float(num / np.sqrt(float(n0 - n1) * float(n0 - n2)))


def kendall_scores(X: DataMatrix) -> ScoreTable:
    _check_nonconstant(X)
    p = X.p
    C = np.eye(p)
    for i in range(p):
        for j in range(i + 1, p):
            C[i, j] = C[j, i] = kendall_tau_b(X.values[:, i], X.values[:, j])
    return ScoreTable(_symmetric_to_pairs(C), "kendall")


# ------------------------------------------------------------------ Lasso

def lasso_objective(Xs, y, beta, lam) -> float:
    r = y - Xs @ beta
    return float(r @ r / (2 * len(y)) + lam * np.sum(np.abs(beta)))


def lambda_max(Xs: np.ndarray, y: np.ndarray) -> float:
    """Smallest penalty at which every coefficient is zero (centred data)."""
    return float(np.max(np.abs(Xs.T @ y)) / len(y))


def kkt_residual(Xs, y, beta, lam) -> float:
    """Largest violation of the Lasso optimality conditions."""
    g = Xs.T @ (y - Xs @ beta) / len(y)
    on = beta != 0
    viol = np.zeros_like(beta)
    viol[on] = np.abs(g[on] - lam * np.sign(beta[on]))
    viol[~on] = np.maximum(np.abs(g[~on]) - lam, 0.0)
    return float(viol.max()) if viol.size else 0.0


def lasso_path(Xs: np.ndarray, y: np.ndarray, lambdas, tol: float = LASSO_TOL,
               max_sweeps: int = 100_000) -> np.ndarray:
    """Coefficients along a decreasing penalty path, one row per penalty.

    Cyclic coordinate descent on ``(1/2n)||y - X b||^2 + lam ||b||_1`` with
    warm starts, via scikit-learn. Inputs must be centred; no intercept is
    fitted. ``tol`` bounds the duality gap relative to ``||y||^2 / n``.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any(np.diff(lambdas) > 0):
        raise ValueError("penalties must be non-increasing")
    Xs = np.asarray(Xs, dtype=float)
    y = np.asarray(y, dtype=float)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        # Gram form: each coordinate update costs O(p) rather than O(n)
        _, coefs, _ = _sk_lasso_path(Xs, y, alphas=lambdas, tol=tol, max_iter=max_sweeps,
                                     precompute=Xs.T @ Xs, Xy=Xs.T @ y)
    return np.ascontiguousarray(coefs.T)


def lambda_grid(lmax: float, n_lambdas: int = 50, ratio: float = 1e-3) -> np.ndarray:
    return np.geomspace(lmax, lmax * ratio, n_lambdas)


def _standardize(v):
    sd = v.std(axis=0, ddof=0)
    return (v - v.mean(axis=0)) / np.where(sd > 0, sd, 1.0)


def lasso_cv(Xs: np.ndarray, y: np.ndarray, folds: int = 5, rng=None, n_lambdas: int = 50) -> tuple[np.ndarray, float]:
    """Fit at the penalty minimising ``folds``-fold CV mean squared error.

    Returns the coefficients on the full data and the chosen penalty.
    """
    n = len(y)
    if folds < 2 or n < 2 * folds:
        raise CvError(f"cannot split n={n} samples into {folds} folds of size >= 2")
    rng = np.random.default_rng(rng)
    yc = y - y.mean()
    lmax = lambda_max(Xs, yc)
    if lmax == 0.0:
        return np.zeros(Xs.shape[1]), 0.0
    lambdas = lambda_grid(lmax, n_lambdas)
    assign = rng.permutation(np.arange(n) % folds)
    mse = np.zeros(len(lambdas))
    for f in range(folds):
        tr, te = assign != f, assign == f
        mu_x, mu_y = Xs[tr].mean(axis=0), y[tr].mean()
        path = lasso_path(Xs[tr] - mu_x, y[tr] - mu_y, lambdas)
        resid = (y[te] - mu_y)[:, None] - (Xs[te] - mu_x) @ path.T
        mse += np.mean(resid**2, axis=0) / folds
    best = int(np.argmin(mse))
    beta = lasso_path(Xs, yc, lambdas[: best + 1])[-1]
    return beta, float(lambdas[best])


def lasso_scores(X: DataMatrix, folds: int = 5, seed: int | None = 0) -> ScoreTable:
    """Directed scores from per-response cross-validated Lasso fits."""
    _check_nonconstant(X)
    Z = _standardize(X.values)
    p = X.p
    coef = np.zeros((p, p))  # coef[i, j]: weight of predictor i in the model for j
    seeds = np.random.SeedSequence(seed).spawn(p)
    for j in range(p):
        others = [i for i in range(p) if i != j]
        beta, _ = lasso_cv(Z[:, others], Z[:, j], folds, np.random.default_rng(seeds[j]))
        coef[others, j] = beta
    idx = PairIndex(p)
    return ScoreTable(np.abs(coef[idx.rows, idx.cols]), "lasso")


def baseline_scores(X: DataMatrix, method: str, seed: int | None = 0, folds: int = 5) -> ScoreTable:
    if method == "pearson":
        return pearson_scores(X)
    if method == "kendall":
        return kendall_scores(X)
    if method == "lasso":
        return lasso_scores(X, folds=folds, seed=seed)
    raise ValueError(f"unknown baseline {method!r}")


BASELINES = ("pearson", "kendall", "lasso")
