"""Slow, independent reference implementations used only by the tests."""
import itertools

import numpy as np

from sscd.benchgen import sample_labels
from sscd.pairspace import DataMatrix
from sscd.pipeline import build_pair_graph


def brute_auc(scores, truth):
    """Fraction of (positive, negative) pairs ranked correctly, ties as 1/2."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(truth).astype(bool)
    pos, neg = s[y], s[~y]
    wins = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
    return wins / (pos.size * neg.size)


def brute_kendall(x, y):
    n = len(x)
    conc = disc = tx = ty = 0
    for a, b in itertools.combinations(range(n), 2):
        dx = np.sign(x[a] - x[b])
        dy = np.sign(y[a] - y[b])
        if dx == 0 and dy == 0:
            continue
        if dx == 0:
            tx += 1
        elif dy == 0:
            ty += 1
        elif dx == dy:
            conc += 1
        else:
            disc += 1
    return (conc - disc) / np.sqrt((conc + disc + tx) * (conc + disc + ty))


def objective(F, L, states, lam):
    lab = states >= 0
    Y = np.zeros_like(F)
    Y[states == 0, 0] = 1.0
    Y[states == 1, 1] = 1.0
    m = L.shape[0]
    return np.sum((F[lab] - Y[lab]) ** 2) / lab.sum() + lam / m**2 * np.trace(F.T @ L @ F)


def numerical_gradient(F, L, states, lam, step=1e-5):
    G = np.zeros_like(F)
    for idx in np.ndindex(*F.shape):
        up, dn = F.copy(), F.copy()
        up[idx] += step
        dn[idx] -= step
        G[idx] = (objective(up, L, states, lam) - objective(dn, L, states, lam)) / (2 * step)
    return G


def gradient_descent(L, states, lam, tol=1e-13, max_iter=500_000, seed=0):
    """Nesterov-accelerated gradient descent on the regularised objective.

    Works from the quadratic's Hessian spectrum only to set the step size and
    momentum; the iterate itself never solves a linear system.
    """
    m = L.shape[0]
    lab = (states >= 0).astype(float)
    Y = np.zeros((m, 2))
    Y[states == 0, 0] = 1.0
    Y[states == 1, 1] = 1.0
    m_L = lab.sum()
    H = 2 * np.diag(lab) / m_L + 2 * lam / m**2 * L
    ev = np.linalg.eigvalsh(H)
    big, small = ev[-1], max(ev[0], 1e-300)
    beta = (np.sqrt(big) - np.sqrt(small)) / (np.sqrt(big) + np.sqrt(small))
    F = np.random.default_rng(seed).normal(size=(m, 2))
    prev = F
    for _ in range(max_iter):
        V = F + beta * (F - prev)
        G = 2 * lab[:, None] * (V - Y) / m_L + 2 * lam / m**2 * (L @ V)
        prev, F = F, V - G / big
        if np.abs(G).max() < tol:
            break
    return F


def random_instance(seed, p_range=(3, 10), lam=None):
    """Small pair graph with random partial labels; ``m = p(p-1) <= 90``."""
    rng = np.random.default_rng(seed)
    p = int(rng.integers(*p_range, endpoint=True))
    n = int(rng.integers(60, 200))
    X = DataMatrix(rng.normal(size=(n, p)) @ rng.normal(size=(p, p)))
    graph = build_pair_graph(X, d_target=None)
    A = (rng.random((p, p)) < 0.3).astype(int)
    np.fill_diagonal(A, 0)
    rho = rng.uniform(0.2, 0.8)
    labels = sample_labels(A, rho, seed=rng.integers(2**31))
    if lam is None:
        # keeps the quadratic well conditioned enough for first-order methods
        lam = float(rng.uniform(0.5, 5.0)) * graph.laplacian.m**2 / labels.m_L
    return graph, labels, lam
