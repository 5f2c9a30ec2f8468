"""ROC/AUC on unlabelled pairs and replicated benchmark experiments."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import rankdata

from .baselines import BASELINES, baseline_scores
from .benchgen import RANDOM, BenchmarkConfig, GoldStandard, make_benchmark, sample_labels
from .errors import ClassError
from .histfeat import DEFAULT_BOUND, DEFAULT_D_TARGET, DEFAULT_H
from .laprls import DEFAULT_LAMBDA, fit
from .pairspace import DataMatrix, LabelAssignment
from .pipeline import build_pair_graph

SSCD = "sscd"
METHODS = (SSCD,) + BASELINES
DEFAULT_RHOS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8)
DEFAULT_N_TRAINS = (200, 500, 1000)
DEFAULT_REPLICATES = 25


@dataclass(frozen=True)
class RocResult:
    auc: float
    fpr: np.ndarray
    tpr: np.ndarray
    n_pos: int
    n_neg: int

    @property
    def roc_points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))


def auc(scores, truth, use_absolute: bool = False) -> RocResult:
    """Area under the ROC curve with ties counted as one half.

    The area is the Mann-Whitney statistic from mid-ranks; the curve has one
    vertex per distinct score, so tied blocks appear as diagonal segments.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(truth).astype(bool)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError("scores and truth must be 1-d arrays of equal length")
    if use_absolute:
        s = np.abs(s)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ClassError(f"need both classes, got {n_pos} positive and {n_neg} negative")
    ranks = rankdata(s)
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    area = u / (n_pos * n_neg)

    order = np.argsort(-s, kind="mergesort")
    s_sorted, y_sorted = s[order], y[order]
    last = np.r_[np.flatnonzero(np.diff(s_sorted) != 0), s.size - 1]
    tp = np.cumsum(y_sorted)[last]
    fp = (last + 1) - tp
    fpr = np.r_[0.0, fp / n_neg]
    tpr = np.r_[0.0, tp / n_pos]
    return RocResult(float(area), fpr, tpr, n_pos, n_neg)


def trapezoid_area(roc: RocResult) -> float:
    return float(np.sum(np.diff(roc.fpr) * (roc.tpr[1:] + roc.tpr[:-1]) / 2.0))


def evaluate_on_unlabelled(result, gold: GoldStandard, labels: LabelAssignment) -> RocResult:
    """AUC restricted to the pairs that were hidden from the learner."""
    truth = gold.truth()
    if truth.size != labels.m:
        raise ValueError("gold standard and labels cover different pair sets")
    U = labels.unlabelled
    return auc(np.asarray(result.scores)[U], truth[U], use_absolute=result.use_absolute)


# ------------------------------------------------------------ experiments

@dataclass(frozen=True)
class ExperimentConfig:
    rhos: tuple[float, ...] = DEFAULT_RHOS
    n_trains: tuple[int, ...] = DEFAULT_N_TRAINS
    methods: tuple[str, ...] = METHODS
    replicates: int = DEFAULT_REPLICATES
    seed: int = 0
    scheme: str = RANDOM
    lam: float = DEFAULT_LAMBDA
    sigma: float | None = None
    h: float = DEFAULT_H
    bound: float = DEFAULT_BOUND
    d_target: int | None = DEFAULT_D_TARGET
    folds: int = 5
    bench: BenchmarkConfig = field(default_factory=BenchmarkConfig)
    threads: int = 1

    def __post_init__(self):
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown method(s): {sorted(unknown)}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("threads")
        d["sigma_rule"] = "median" if self.sigma is None else "fixed"
        d["seed_rule"] = "replicate r uses seed + r"
        return d


@dataclass
class ExperimentReport:
    config: dict
    records: list[dict] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def aucs(self, method: str, rho: float, n_train: int) -> list[float]:
        return [r["auc"] for r in self.records
                if r["method"] == method and r["rho"] == rho and r["n_train"] == n_train]

    def mean(self, method, rho, n_train) -> float:
        a = self.aucs(method, rho, n_train)
        return float(np.mean(a)) if a else math.nan

    def se(self, method, rho, n_train) -> float:
        a = self.aucs(method, rho, n_train)
        return float(np.std(a, ddof=1) / math.sqrt(len(a))) if len(a) > 1 else math.nan

    def summary(self) -> list[dict]:
        keys = sorted({(r["method"], r["rho"], r["n_train"]) for r in self.records})
        out = []
        for method, rho, n_train in keys:
            se = self.se(method, rho, n_train)
            out.append({"method": method, "rho": rho, "n_train": n_train,
                        "replicates": len(self.aucs(method, rho, n_train)),
                        "mean_auc": self.mean(method, rho, n_train),
                        "se": None if math.isnan(se) else se})
        return out

    def to_json(self) -> str:
        return json.dumps({"config": self.config, "summary": self.summary(),
                           "results": self.records, "errors": self.errors},
                          indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", "rho", "n_train", "replicate", "auc"])
        for r in self.records:
            w.writerow([r["method"], r["rho"], r["n_train"], r["replicate"], repr(r["auc"])])
        return buf.getvalue()


def _rho_key(rho: float) -> int:
    return int(round(rho * 1_000_000))


def _subsample(X: DataMatrix, n_train: int, rng) -> DataMatrix:
    if n_train >= X.n:
        return X
    return X.subset_rows(np.sort(rng.choice(X.n, size=n_train, replace=False)))


def _run_replicate(config: ExperimentConfig, r: int, data: DataMatrix | None, gold: GoldStandard | None):
    seed = config.seed + r
    records, errors = [], []

    def fail(stage, exc, **where):
        errors.append(dict(where, replicate=r, stage=stage, error=f"{type(exc).__name__}: {exc}"))

    if data is None:
        try:
            bench = make_benchmark(config.bench, seed)
        except Exception as exc:
            fail("benchmark", exc)
            return records, errors
        gold = bench.gold

    labels = {}
    for rho in config.rhos:
        try:
            labels[rho] = sample_labels(gold.A, rho, config.scheme, seed=[seed, 1, _rho_key(rho)])
        except Exception as exc:
            fail("labels", exc, rho=rho)

    for n_train in config.n_trains:
        try:
            if data is None:
                X = bench.training_matrix(n_train, seed=[seed, 2, n_train])
            else:
                X = _subsample(data, n_train, np.random.default_rng([seed, 2, n_train]))
        except Exception as exc:
            fail("training_data", exc, n_train=n_train)
            continue
        scorers = {}
        for method in config.methods:
            try:
                if method == SSCD:
                    scorers[method] = build_pair_graph(X, config.h, config.bound, config.d_target, config.sigma)
                else:
                    scorers[method] = baseline_scores(X, method, seed=[seed, 3, n_train], folds=config.folds)
            except Exception as exc:
                fail("scoring", exc, n_train=n_train, method=method)
        for rho, lab in labels.items():
            for method, scorer in scorers.items():
                try:
                    if method == SSCD:
                        scorer = fit(scorer.laplacian, lab, config.lam, sigma=scorer.sigma)
                    roc = evaluate_on_unlabelled(scorer, gold, lab)
                except Exception as exc:
                    fail("evaluate", exc, n_train=n_train, method=method, rho=rho)
                    continue
                records.append({"method": method, "rho": rho, "n_train": n_train,
                                "replicate": r, "auc": roc.auc})
    return records, errors


def run_experiment(config: ExperimentConfig, data: DataMatrix | None = None,
                   gold: GoldStandard | None = None) -> ExperimentReport:
    """Replicated sweep over label fractions and training sizes.

    Without ``data`` each replicate draws a fresh synthetic benchmark. With
    ``data`` and ``gold`` supplied, replicates differ only in label draws and
    in the random subsample of ``n_train`` rows. Failures are recorded per
    cell and do not stop other cells.
    """
    if (data is None) != (gold is None):
        raise ValueError("external data and gold standard must be given together")
    if data is not None and gold.p != data.p:
        raise ValueError(f"gold standard has {gold.p} variables, data has {data.p}")
    args = [(config, r, data, gold) for r in range(config.replicates)]
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as ex:
            outs = list(ex.map(_run_replicate, *zip(*args)))
    else:
        outs = [_run_replicate(*a) for a in args]
    report = ExperimentReport(config.echo())
    for records, errors in outs:
        report.records.extend(records)
        report.errors.extend(errors)
    order = {m: i for i, m in enumerate(config.methods)}
    report.records.sort(key=lambda d: (order[d["method"]], d["rho"], d["n_train"], d["replicate"]))
    return report
