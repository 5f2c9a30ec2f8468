"""Synthetic interventional benchmarks built on linear-Gaussian SEMs.

A benchmark mimics a knockout screen: a random DAG over ``p + p_extra``
variables, of which ``p`` form the vertex set of interest ``C``. Every
variable in ``C`` is intervened on once; a robust z-score against held-out
observational samples turns those interventions into the gold-standard
adjacency matrix. Training data are the remaining observational samples plus
interventions on variables *outside* ``C`` only, so nothing used to build the
gold standard leaks into the training matrix.
"""
from __future__ import annotations

import graphlib
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import CycleError, DegenerateVariable, ParamError
from .pairspace import DataMatrix, LabelAssignment, PairIndex, as_adjacency, labels_from_adjacency

ZSCORE = "zscore"
REACHABILITY = "reachability"
RANDOM = "random"
ROWWISE = "rowwise"

DEFAULT_TAU = 5.0
DEFAULT_MIN_DENSITY = 0.025


@dataclass(frozen=True)
class SemSpec:
    """Linear SEM ``x_v = sum_u w_uv x_u + e_v`` with ``e_v ~ N(0, noise_sd^2)``."""

    p: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...]
    noise_sd: float = 1.0
    seed: int = 0

    def __post_init__(self):
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)
        if len(edges) != len(weights):
            raise ValueError("one weight per edge required")
        for (u, v), w in zip(edges, weights):
            if not (0 <= u < self.p and 0 <= v < self.p) or u == v:
                raise ValueError(f"invalid edge ({u}, {v})")
            if not math.isfinite(w) or w == 0.0:
                raise ValueError(f"edge ({u}, {v}) needs a finite non-zero weight")
        if self.noise_sd <= 0:
            raise ValueError("noise_sd must be positive")

    def weight_matrix(self) -> np.ndarray:
        B = np.zeros((self.p, self.p))
        for (u, v), w in zip(self.edges, self.weights):
            B[u, v] = w
        return B

    def topological_order(self) -> list[int]:
        ts = graphlib.TopologicalSorter({v: set() for v in range(self.p)})
        for u, v in self.edges:
            ts.add(v, u)
        try:
            return list(ts.static_order())
        except graphlib.CycleError as exc:
            raise CycleError(f"edge set has a cycle through {exc.args[1]}") from None

    def covariance(self) -> np.ndarray:
        """Population covariance of the observational distribution."""
        self.topological_order()
        M = np.linalg.inv(np.eye(self.p) - self.weight_matrix())
        return self.noise_sd**2 * M.T @ M

    def to_json(self) -> str:
        d = asdict(self)
        d["edges"] = [list(e) for e in self.edges]
        d["weights"] = list(self.weights)
        return json.dumps(d, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SemSpec":
        d = json.loads(text)
        d["edges"] = tuple(tuple(e) for e in d["edges"])
        d["weights"] = tuple(d["weights"])
        return cls(**d)


def random_sem(p: int, edge_prob: float, seed: int = 0, weight_range=(0.5, 1.5), noise_sd: float = 1.0) -> SemSpec:
    """Random DAG (Erdos-Renyi over a random causal order) with weights ``+-U(weight_range)``."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(p)
    edges, weights = [], []
    lo, hi = weight_range
    for a in range(p):
        for b in range(a + 1, p):
            if rng.random() < edge_prob:
                edges.append((int(order[a]), int(order[b])))
                weights.append(float(rng.choice((-1.0, 1.0)) * rng.uniform(lo, hi)))
    return SemSpec(p, tuple(edges), tuple(weights), noise_sd, seed)


@dataclass(frozen=True)
class InterventionSample:
    target: int
    value: float
    values: np.ndarray


def _simulate(spec: SemSpec, n: int, targets, values, rng) -> np.ndarray:
    order = spec.topological_order()
    B = spec.weight_matrix()
    E = rng.normal(0.0, spec.noise_sd, size=(n, spec.p))
    X = np.zeros((n, spec.p))
    for v in order:
        X[:, v] = X @ B[:, v] + E[:, v]
        hit = targets == v
        if hit.any():
            X[hit, v] = values[hit]
    return X


def simulate_sem(spec: SemSpec, n_obs: int, interventions=(), rng=None, names=None):
    """Draw observational rows and one row per ``(target, value)`` intervention.

    Interventions clamp the target (its structural equation is removed) and
    propagate downstream. Without ``rng`` the draw is seeded by ``spec.seed``.

    Returns
    -------
    (DataMatrix, list[InterventionSample])
    """
    if n_obs < 2:
        raise ValueError("n_obs must be >= 2")
    rng = np.random.default_rng(spec.seed if rng is None else rng)
    none = np.full(n_obs, -1)
    obs = _simulate(spec, n_obs, none, np.zeros(n_obs), rng)
    names = names or [f"X{v}" for v in range(spec.p)]
    samples = []
    if len(interventions):
        targets = np.array([int(t) for t, _ in interventions])
        values = np.array([float(c) for _, c in interventions])
        if np.any((targets < 0) | (targets >= spec.p)):
            raise ValueError("intervention target out of range")
        rows = _simulate(spec, len(targets), targets, values, rng)
        samples = [InterventionSample(int(t), float(c), r) for t, c, r in zip(targets, values, rows)]
    return DataMatrix(obs, names), samples


@dataclass(frozen=True)
class GoldStandard:
    A: np.ndarray
    tau: float
    provenance: str
    variable_names: tuple[str, ...] = ()

    @property
    def p(self) -> int:
        return self.A.shape[0]

    def truth(self) -> np.ndarray:
        """Binary label of every ordered pair in canonical order."""
        idx = PairIndex(self.p)
        return self.A[idx.rows, idx.cols].astype(np.int8)

    def to_json(self) -> str:
        return json.dumps({
            "A": self.A.astype(int).tolist(),
            "tau": None if math.isinf(self.tau) else self.tau,
            "provenance": self.provenance,
            "variable_names": list(self.variable_names),
        }, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GoldStandard":
        d = json.loads(text)
        tau = math.inf if d.get("tau") is None else float(d["tau"])
        return cls(as_adjacency(d["A"]), tau, d["provenance"], tuple(d.get("variable_names", ())))


def robust_zscores(intervention_rows, obs_holdout) -> np.ndarray:
    """``Z[i, j] = |x_ij - median_j| / IQR_j`` with type-7 quantiles.

    ``intervention_rows`` maps each cause ``i`` to the row measured after
    intervening on ``i`` (a ``p x p`` array works too, row ``i`` per cause).
    """
    H = np.asarray(obs_holdout.values if isinstance(obs_holdout, DataMatrix) else obs_holdout, dtype=float)
    p = H.shape[1]
    if isinstance(intervention_rows, dict):
        if set(intervention_rows) != set(range(p)):
            raise ValueError("need exactly one intervention row per variable")
        R = np.array([np.asarray(intervention_rows[i], dtype=float) for i in range(p)])
    else:
        R = np.asarray(intervention_rows, dtype=float)
    if R.shape != (p, p):
        raise ValueError(f"intervention rows must form a {p}x{p} array, got {R.shape}")
    q25, med, q75 = np.percentile(H, [25, 50, 75], axis=0)
    iqr = q75 - q25
    bad = np.flatnonzero(iqr <= 0)
    if bad.size:
        raise DegenerateVariable(bad.tolist())
    return np.abs(R - med[None, :]) / iqr[None, :]


def zscore_gold_standard(intervention_rows, obs_holdout, tau: float = DEFAULT_TAU) -> GoldStandard:
    """Causal iff the robust z-score strictly exceeds ``tau``; the diagonal is zero."""
    Z = robust_zscores(intervention_rows, obs_holdout)
    A = (Z > tau).astype(np.int8)
    np.fill_diagonal(A, 0)
    names = obs_holdout.variable_names if isinstance(obs_holdout, DataMatrix) else ()
    return GoldStandard(A, float(tau), ZSCORE, tuple(names))


def reachability_gold_standard(spec: SemSpec, subset=None) -> GoldStandard:
    """Transitive closure of the DAG, optionally restricted to ``subset`` (paths may leave it)."""
    order = spec.topological_order()
    R = np.zeros((spec.p, spec.p), dtype=bool)
    children = [[] for _ in range(spec.p)]
    for u, v in spec.edges:
        children[u].append(v)
    for u in reversed(order):
        for v in children[u]:
            R[u, v] = True
            R[u] |= R[v]
    if subset is not None:
        subset = list(subset)
        R = R[np.ix_(subset, subset)]
    np.fill_diagonal(R, False)
    return GoldStandard(R.astype(np.int8), math.inf, REACHABILITY)


def density_check(A, min_fraction: float = DEFAULT_MIN_DENSITY) -> bool:
    A = np.asarray(A)
    p = A.shape[0]
    ones = int(A.sum() - np.trace(A))
    return ones >= min_fraction * p * (p - 1)


def rows_check(A, min_rows: float = 0.5) -> bool:
    """At least ``min_rows`` of the rows have one or more causal effects."""
    A = np.asarray(A)
    return np.count_nonzero(A.any(axis=1)) >= min_rows * A.shape[0]


def sample_labels(A, rho: float, scheme: str = RANDOM, seed=None) -> LabelAssignment:
    """Reveal a fraction ``rho`` of the gold standard.

    ``random`` labels ``floor(rho * m)`` pairs chosen uniformly; ``rowwise``
    labels every pair of ``floor(rho * p)`` cause variables.
    """
    if not 0 < rho < 1:
        raise ParamError(f"rho must lie in (0, 1), got {rho}")
    A = as_adjacency(A)
    p = A.shape[0]
    idx = PairIndex(p)
    rng = np.random.default_rng(seed)
    mask = np.zeros(idx.m, dtype=bool)
    if scheme == RANDOM:
        count = math.floor(rho * idx.m)
        if count == 0:
            raise ParamError(f"rho={rho} labels no pairs out of {idx.m}")
        mask[rng.choice(idx.m, size=count, replace=False)] = True
    elif scheme == ROWWISE:
        count = math.floor(rho * p)
        if count == 0:
            raise ParamError(f"rho={rho} labels no rows out of {p}")
        rows = rng.choice(p, size=count, replace=False)
        mask[np.isin(idx.rows, rows)] = True
    else:
        raise ParamError(f"unknown label scheme {scheme!r}")
    return labels_from_adjacency(A, mask)


# -------------------------------------------------------------- benchmark

@dataclass(frozen=True)
class BenchmarkConfig:
    p: int = 20
    p_extra: int = 20
    edge_prob: float = 0.3
    weight_range: tuple[float, float] = (0.5, 1.5)
    noise_sd: float = 1.0
    n_obs: int = 160
    strength: float = 10.0
    tau: float = DEFAULT_TAU
    min_density: float = DEFAULT_MIN_DENSITY
    require_rows: bool = False
    max_tries: int = 200


@dataclass(frozen=True)
class Benchmark:
    config: BenchmarkConfig
    spec: SemSpec
    subset: tuple[int, ...]
    variable_names: tuple[str, ...]
    obs_holdout: DataMatrix
    obs_train: np.ndarray
    gold: GoldStandard
    reach: GoldStandard
    gold_interventions: tuple[InterventionSample, ...] = field(default=())

    def training_matrix(self, n_train: int, seed=None) -> DataMatrix:
        """Held-out-free training data of ``n_train`` rows.

        Observational training rows come first; the rest are single-variable
        interventions on randomly chosen variables outside the subset.
        """
        n_obs = self.obs_train.shape[0]
        n_int = n_train - n_obs
        if n_int < 0:
            raise ParamError(f"n_train={n_train} is smaller than the {n_obs} observational training rows")
        rows = [self.obs_train]
        if n_int:
            outside = np.setdiff1d(np.arange(self.spec.p), self.subset)
            if outside.size == 0:
                raise ParamError("interventional training rows need p_extra >= 1")
            rng = np.random.default_rng(seed)
            targets = rng.choice(outside, size=n_int)
            sd = np.sqrt(np.diag(self.spec.covariance()))
            rows.append(_simulate(self.spec, n_int, targets, -self.config.strength * sd[targets], rng))
        X = np.vstack(rows)[:, list(self.subset)]
        return DataMatrix(X, self.variable_names)


def make_benchmark(config: BenchmarkConfig = BenchmarkConfig(), seed: int = 0) -> Benchmark:
    """Draw SEMs until the z-score gold standard passes the density filter(s)."""
    if config.p < 2:
        raise ParamError("p must be >= 2")
    ss = np.random.SeedSequence(seed)
    for attempt in range(config.max_tries):
        rng = np.random.default_rng(ss.spawn(1)[0])
        p_total = config.p + config.p_extra
        spec = random_sem(p_total, config.edge_prob, int(rng.integers(2**31)), config.weight_range, config.noise_sd)
        subset = tuple(sorted(int(v) for v in rng.choice(p_total, size=config.p, replace=False)))
        names = tuple(f"G{v}" for v in subset)
        sd = np.sqrt(np.diag(spec.covariance()))
        gold_ints = [(i, -config.strength * sd[i]) for i in subset]
        obs, samples = simulate_sem(spec, config.n_obs, gold_ints, rng=rng)
        half = config.n_obs // 2
        holdout = DataMatrix(obs.values[:half][:, list(subset)], names)
        R = np.array([s.values[list(subset)] for s in samples])
        try:
            gold = zscore_gold_standard(R, holdout, config.tau)
        except DegenerateVariable:
            continue
        if not density_check(gold.A, config.min_density):
            continue
        if config.require_rows and not rows_check(gold.A):
            continue
        return Benchmark(config, spec, subset, names, holdout, obs.values[half:],
                         gold, reachability_gold_standard(spec, subset), tuple(samples))
    raise ParamError(f"no benchmark passed the density filter in {config.max_tries} attempts")
