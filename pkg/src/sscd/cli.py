"""Command-line entry point: ``sscd {simulate,features,fit,baselines,evaluate}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import BASELINES, baseline_scores
from .benchgen import RANDOM, ROWWISE, BenchmarkConfig, GoldStandard, make_benchmark, sample_labels
from .errors import SSCDError
from .evalx import DEFAULT_N_TRAINS, DEFAULT_REPLICATES, DEFAULT_RHOS, METHODS, ExperimentConfig, run_experiment
from .histfeat import DEFAULT_BOUND, DEFAULT_D_TARGET, DEFAULT_H, pair_features, pca_reduce, standardize_truncate
from .laprls import DEFAULT_LAMBDA, LAMBDA_GRID
from .pairspace import DataMatrix, PairIndex, read_label_csv, write_label_csv
from .pipeline import sscd_fit

log = logging.getLogger("sscd")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class InputError(Exception):
    """Missing or unreadable input file; maps to exit code 2."""


def _csv_floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip())


def _csv_ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(",") if t.strip())


def _methods(text: str) -> tuple[str, ...]:
    out = tuple(t.strip() for t in text.split(",") if t.strip())
    bad = [m for m in out if m not in METHODS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown method(s) {bad}; choose from {','.join(METHODS)}")
    return out


def _p_arg(text: str) -> int:
    p = int(text)
    if p < 2:
        raise argparse.ArgumentTypeError("p must be >= 2")
    return p


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"input file not found: {p}")
    return p


def _add_feature_flags(sp):
    sp.add_argument("--h", type=float, default=DEFAULT_H, help="histogram bin width (default %(default)s)")
    sp.add_argument("--bound", type=float, default=DEFAULT_BOUND,
                    help="standardised data are clamped to [-bound, bound] (default %(default)s)")
    sp.add_argument("--d-target", type=int, default=DEFAULT_D_TARGET,
                    help="PCA dimension for pair features; 0 keeps raw histograms (default %(default)s)")


def _add_fit_flags(sp):
    _add_feature_flags(sp)
    sp.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA,
                    help=f"smoothness weight (default %(default)s; coarse grid {list(LAMBDA_GRID)})")
    sp.add_argument("--sigma", type=float, default=None,
                    help="RBF bandwidth; default is the median pair distance")


def _add_bench_flags(sp):
    d = BenchmarkConfig()
    sp.add_argument("--p", type=_p_arg, default=d.p, help="variables of interest (default %(default)s)")
    sp.add_argument("--p-extra", type=int, default=d.p_extra,
                    help="additional SEM variables used only as training intervention targets (default %(default)s)")
    sp.add_argument("--edge-prob", type=float, default=d.edge_prob, help="DAG edge probability (default %(default)s)")
    sp.add_argument("--n-obs", type=int, default=d.n_obs,
                    help="observational samples; half build the gold standard, half train (default %(default)s)")
    sp.add_argument("--strength", type=float, default=d.strength,
                    help="interventions clamp a variable to -strength observational sds (default %(default)s)")
    sp.add_argument("--tau", type=float, default=d.tau, help="robust z-score threshold (default %(default)s)")
    sp.add_argument("--min-density", type=float, default=d.min_density,
                    help="minimum fraction of causal pairs in the gold standard (default %(default)s)")
    sp.add_argument("--require-rows", action="store_true",
                    help="also require at least half the rows of the gold standard to contain a causal pair")


def _bench_config(args) -> BenchmarkConfig:
    return BenchmarkConfig(p=args.p, p_extra=args.p_extra, edge_prob=args.edge_prob, n_obs=args.n_obs,
                           strength=args.strength, tau=args.tau, min_density=args.min_density,
                           require_rows=args.require_rows)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sscd", description="Semi-supervised causal discovery over variable pairs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="generate a synthetic interventional benchmark")
    _add_bench_flags(sp)
    sp.add_argument("--n-train", type=int, default=500, help="rows in train.csv (default %(default)s)")
    sp.add_argument("--rho", type=float, default=None, help="also write labels.csv revealing this fraction")
    sp.add_argument("--scheme", choices=(RANDOM, ROWWISE), default=RANDOM)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", type=Path, default=Path("."), help="output directory")

    sp = sub.add_parser("features", help="write pair-feature matrices")
    sp.add_argument("--data", required=True)
    _add_feature_flags(sp)
    sp.add_argument("--out", type=Path, required=True, help="output prefix (.csv, .bin, .json)")

    sp = sub.add_parser("fit", help="fit SSCD to a data matrix and partial labels")
    sp.add_argument("--data", required=True, help="CSV, header of variable names")
    sp.add_argument("--labels", required=True, help="CSV with columns from,to,label")
    _add_fit_flags(sp)
    sp.add_argument("--out", type=Path, required=True)

    sp = sub.add_parser("baselines", help="score pairs with correlation / Lasso baselines")
    sp.add_argument("--data", required=True)
    sp.add_argument("--methods", type=_methods, default=BASELINES)
    sp.add_argument("--folds", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", type=Path, required=True)

    sp = sub.add_parser("evaluate", help="replicated AUC experiment over label fractions and sample sizes")
    _add_bench_flags(sp)
    _add_fit_flags(sp)
    sp.add_argument("--data", default=None, help="external data CSV (requires --gold)")
    sp.add_argument("--gold", default=None, help="external gold-standard JSON")
    sp.add_argument("--rhos", type=_csv_floats, default=DEFAULT_RHOS,
                    help="label fractions (default %(default)s)")
    sp.add_argument("--n-train", dest="n_trains", type=_csv_ints, default=DEFAULT_N_TRAINS,
                    help="training sample sizes (default %(default)s)")
    sp.add_argument("--methods", type=_methods, default=METHODS, help="comma-separated subset of " + ",".join(METHODS))
    sp.add_argument("--scheme", choices=(RANDOM, ROWWISE), default=RANDOM, help="label sampling (default %(default)s)")
    sp.add_argument("--replicates", type=int, default=DEFAULT_REPLICATES, help="(default %(default)s)")
    sp.add_argument("--folds", type=int, default=5, help="Lasso CV folds (default %(default)s)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=1, help="worker processes for replicates (default %(default)s)")
    sp.add_argument("--out", type=Path, default=Path("report"), help="output prefix (.json, .csv)")
    return ap


def _pair_records(names, scores, predictions=None, labelled=None):
    idx = PairIndex(len(names))
    lab = set() if labelled is None else set(int(k) for k in labelled)
    out = []
    for k, (a, b) in enumerate(idx.names(names)):
        rec = {"from": a, "to": b, "score": float(scores[k])}
        if predictions is not None:
            rec["prediction"] = int(predictions[k])
            rec["was_labelled"] = k in lab
        out.append(rec)
    return out


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def cmd_simulate(args) -> int:
    bench = make_benchmark(_bench_config(args), args.seed)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    names = bench.variable_names
    sub = list(bench.subset)
    _write(out / "sem.json", bench.spec.to_json())
    obs = np.vstack([bench.obs_holdout.values, bench.obs_train[:, sub]])
    DataMatrix(obs, names).to_csv(out / "observational.csv")
    DataMatrix(np.array([s.values[sub] for s in bench.gold_interventions]), names).to_csv(out / "interventional.csv")
    _write(out / "interventions.json", json.dumps(
        [{"target": names[sub.index(s.target)], "value": s.value} for s in bench.gold_interventions], indent=2))
    bench.training_matrix(args.n_train, seed=[args.seed, 2, args.n_train]).to_csv(out / "train.csv")
    _write(out / "gold.json", GoldStandard(bench.gold.A, bench.gold.tau, bench.gold.provenance, names).to_json())
    if args.rho is not None:
        labels = sample_labels(bench.gold.A, args.rho, args.scheme, seed=args.seed)
        write_label_csv(out / "labels.csv", labels, names)
    log.info("wrote benchmark to %s", out)
    return EXIT_OK


def _load_data(path) -> DataMatrix:
    return DataMatrix.from_csv(_existing(path))


def cmd_features(args) -> int:
    X = _load_data(args.data)
    F = pair_features(standardize_truncate(X, args.bound), args.h, args.bound)
    if args.d_target > 0:
        F = pca_reduce(F, args.d_target)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    F.to_csv(args.out.with_suffix(".csv"))
    F.save(args.out)
    return EXIT_OK


def cmd_fit(args) -> int:
    X = _load_data(args.data)
    labels = read_label_csv(_existing(args.labels), X.variable_names)
    d_target = args.d_target if args.d_target > 0 else None
    res = sscd_fit(X, labels, args.lam, args.h, args.bound, d_target, args.sigma)
    doc = {
        "method": "sscd",
        "config": {"lambda": args.lam, "sigma": res.sigma, "sigma_rule": "fixed" if args.sigma else "median",
                   "h": args.h, "bound": args.bound, "d_target": args.d_target,
                   "m": labels.m, "m_labelled": labels.m_L},
        "pairs": _pair_records(X.variable_names, res.scores, res.predictions, res.labelled),
    }
    _write(args.out, json.dumps(doc, indent=2))
    return EXIT_OK


def cmd_baselines(args) -> int:
    X = _load_data(args.data)
    doc = {}
    for method in args.methods:
        if method not in BASELINES:
            raise InputError(f"{method} is not a baseline")
        table = baseline_scores(X, method, seed=args.seed, folds=args.folds)
        doc[method] = {"method": method, "use_absolute": table.use_absolute,
                       "pairs": _pair_records(X.variable_names, table.scores)}
    _write(args.out, json.dumps(doc, indent=2))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    data = gold = None
    if (args.data is None) != (args.gold is None):
        raise InputError("--data and --gold must be given together")
    if args.data is not None:
        data = _load_data(args.data)
        gold = GoldStandard.from_json(_existing(args.gold).read_text())
    config = ExperimentConfig(
        rhos=args.rhos, n_trains=args.n_trains, methods=args.methods, replicates=args.replicates,
        seed=args.seed, scheme=args.scheme, lam=args.lam, sigma=args.sigma, h=args.h, bound=args.bound,
        d_target=args.d_target if args.d_target > 0 else None, folds=args.folds,
        bench=_bench_config(args), threads=args.threads,
    )
    report = run_experiment(config, data, gold)
    _write(args.out.with_suffix(".json"), report.to_json())
    _write(args.out.with_suffix(".csv"), report.to_csv())
    for row in report.summary():
        se = "nan" if row["se"] is None else f"{row['se']:.3f}"
        print(f"{row['method']:8s} rho={row['rho']:<5g} n_train={row['n_train']:<5d} "
              f"auc={row['mean_auc']:.3f} se={se} (n={row['replicates']})")
    for err in report.errors:
        log.warning("failed: %s", err)
    return EXIT_OK if report.ok else EXIT_FAILED


COMMANDS = {
    "simulate": cmd_simulate,
    "features": cmd_features,
    "fit": cmd_fit,
    "baselines": cmd_baselines,
    "evaluate": cmd_evaluate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"sscd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SSCDError, OSError, ValueError) as exc:
        print(f"sscd: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
