import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_auc
from sscd.benchgen import BenchmarkConfig, make_benchmark, sample_labels
from sscd.errors import ClassError
from sscd.evalx import ExperimentConfig, auc, evaluate_on_unlabelled, run_experiment, trapezoid_area
from sscd.laprls import FitResult


def test_fixed_example():
    r = auc([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0])
    assert r.auc == 0.75
    assert r.roc_points[0] == (0.0, 0.0) and r.roc_points[-1] == (1.0, 1.0)


def test_matches_brute_force_with_ties():
    rng = np.random.default_rng(0)
    for _ in range(500):
        n = int(rng.integers(2, 80))
        s = rng.integers(0, int(rng.integers(1, 10)), size=n).astype(float)
        y = rng.random(n) < rng.uniform(0.1, 0.9)
        if y.all() or not y.any():
            continue
        assert abs(auc(s, y).auc - brute_auc(s, y)) <= 1e-12


def test_all_tied_is_half():
    assert auc(np.ones(6), [1, 0, 1, 0, 0, 1]).auc == 0.5


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.booleans()), min_size=2, max_size=40))
def test_trapezoid_equals_rank_statistic(rows):
    s = np.array([r[0] for r in rows], dtype=float)
    y = np.array([r[1] for r in rows])
    if y.all() or not y.any():
        return
    r = auc(s, y)
    assert trapezoid_area(r) == pytest.approx(r.auc, abs=1e-12)
    assert r.auc == pytest.approx(brute_auc(s, y), abs=1e-12)


def test_monotone_invariance_and_reversal():
    rng = np.random.default_rng(1)
    s = rng.normal(size=100)
    y = rng.random(100) < 0.3
    a = auc(s, y).auc
    assert auc(np.exp(3 * s) + 2, y).auc == pytest.approx(a, abs=1e-15)
    assert auc(-s, y).auc == pytest.approx(1 - a, abs=1e-12)


def test_absolute_scores():
    assert auc([-0.9, 0.1, 0.8, -0.2], [1, 0, 1, 0], use_absolute=True).auc == 1.0


def test_single_class_rejected():
    with pytest.raises(ClassError):
        auc([0.1, 0.2], [1, 1])


def test_evaluation_restricted_to_unlabelled():
    b = make_benchmark(seed=0)
    lab = sample_labels(b.gold.A, 0.5, seed=1)
    truth = b.gold.truth().astype(float)
    # perfect on unlabelled pairs, adversarial on labelled ones
    f = np.c_[1 - truth, truth]
    f[lab.labelled] = f[lab.labelled][:, ::-1]
    assert evaluate_on_unlabelled(FitResult(f, 0.001), b.gold, lab).auc == 1.0


def _small_config(**kw):
    base = dict(rhos=(0.3, 0.6), n_trains=(200,), methods=("sscd", "pearson"), replicates=2, seed=5,
                bench=BenchmarkConfig(p=8, p_extra=8, edge_prob=0.4))
    base.update(kw)
    return ExperimentConfig(**base)


def test_report_shape_and_csv():
    rep = run_experiment(_small_config())
    assert rep.ok
    assert len(rep.records) == 2 * 2 * 2
    lines = rep.to_csv().splitlines()
    assert lines[0] == "method,rho,n_train,replicate,auc"
    assert len(lines) == 1 + 8
    summary = rep.summary()
    assert {s["method"] for s in summary} == {"sscd", "pearson"}
    assert all(s["replicates"] == 2 for s in summary)
    doc = json.loads(rep.to_json())
    assert doc["config"]["sigma_rule"] == "median"


def test_experiment_deterministic():
    a = run_experiment(_small_config()).to_json()
    b = run_experiment(_small_config()).to_json()
    assert a == b


def test_failures_are_recorded_per_cell():
    rep = run_experiment(_small_config(rhos=(0.3, 0.001), replicates=1))
    assert not rep.ok
    assert all(e["stage"] == "labels" for e in rep.errors)
    assert len(rep.aucs("sscd", 0.3, 200)) == 1


def test_external_data_requires_gold():
    b = make_benchmark(seed=0)
    with pytest.raises(ValueError):
        run_experiment(_small_config(), data=b.training_matrix(200))
