import math

import numpy as np
import pytest

from sscd.benchgen import (
    ROWWISE,
    BenchmarkConfig,
    GoldStandard,
    SemSpec,
    density_check,
    make_benchmark,
    random_sem,
    reachability_gold_standard,
    robust_zscores,
    rows_check,
    sample_labels,
    simulate_sem,
    zscore_gold_standard,
)
from sscd.errors import CycleError, DegenerateVariable, ParamError
from sscd.pairspace import PairIndex


def test_chain_covariance():
    spec = SemSpec(2, ((0, 1),), (0.8,), noise_sd=1.5, seed=3)
    X, _ = simulate_sem(spec, 100_000)
    emp = np.cov(X.values, rowvar=False)
    assert emp[0, 1] == pytest.approx(0.8 * 1.5**2, rel=0.05)
    assert np.allclose(spec.covariance(), [[2.25, 1.8], [1.8, 0.8**2 * 2.25 + 2.25]])


def test_intervention_clamps_and_propagates():
    spec = SemSpec(3, ((0, 1), (1, 2)), (2.0, 1.0), seed=0)
    _, samples = simulate_sem(spec, 10, [(0, -7.0), (0, -7.0), (2, 4.0)])
    assert [s.values[0] for s in samples[:2]] == [-7.0, -7.0]
    assert samples[2].values[2] == 4.0
    # downstream of the clamp: x1 = 2 * (-7) + noise
    assert abs(samples[0].values[1] + 14.0) < 6.0


def test_cycle_rejected():
    spec = SemSpec(3, ((0, 1), (1, 2), (2, 0)), (1.0, 1.0, 1.0))
    with pytest.raises(CycleError):
        simulate_sem(spec, 10)


def test_sem_json_roundtrip():
    spec = random_sem(8, 0.3, seed=4)
    assert SemSpec.from_json(spec.to_json()) == spec


def test_simulation_deterministic():
    spec = random_sem(6, 0.4, seed=5)
    a, _ = simulate_sem(spec, 50, [(1, 3.0)])
    b, _ = simulate_sem(spec, 50, [(1, 3.0)])
    assert np.array_equal(a.values, b.values)


def _holdout(p=3):
    # every column: 0..100, so median 50 and IQR 50 (type-7 quantiles)
    return np.tile(np.linspace(0.0, 100.0, 101)[:, None], (1, p))


def test_zscore_examples():
    H = _holdout()
    R = np.full((3, 3), 50.0)
    R[0, 1] = 50.0 + 6 * 50.0   # 6 IQR above the median
    R[0, 2] = 50.0 - 5 * 50.0   # exactly on the threshold
    R[1, 2] = 50.0 + 5.0001 * 50.0
    Z = robust_zscores(R, H)
    assert Z[0, 1] == pytest.approx(6.0)
    gold = zscore_gold_standard(R, H, tau=5.0)
    assert gold.A[0, 1] == 1
    assert gold.A[0, 2] == 0
    assert gold.A[1, 2] == 1
    assert np.all(np.diag(gold.A) == 0)
    assert not zscore_gold_standard(R, H, tau=math.inf).A.any()


def test_zscore_degenerate_column():
    H = _holdout()
    H[:, 1] = 4.0
    with pytest.raises(DegenerateVariable) as info:
        robust_zscores(np.zeros((3, 3)), H)
    assert info.value.indices == [1]


def test_density_and_rows_checks():
    A = np.zeros((50, 50), dtype=int)
    A.ravel()[np.flatnonzero(~np.eye(50, dtype=bool).ravel())[:62]] = 1
    assert A.sum() == 62 and density_check(A)
    A.ravel()[np.flatnonzero(A.ravel())[0]] = 0
    assert not density_check(A)
    B = np.zeros((4, 4), dtype=int)
    B[0, 1] = B[1, 2] = 1
    assert rows_check(B) and not rows_check(B[:3, :3] * 0)


def test_label_sampling_counts():
    A = np.zeros((10, 10), dtype=int)
    A[0, 1] = 1
    lab = sample_labels(A, 0.5, ROWWISE, seed=0)
    assert lab.m_L == 45
    rows = np.unique(PairIndex(10).rows[lab.labelled])
    assert rows.size == 5
    assert sample_labels(A, 0.5, seed=0).m_L == 45
    assert sample_labels(A, 0.33, seed=0).m_L == math.floor(0.33 * 90)
    with pytest.raises(ParamError):
        sample_labels(A, 0.0)
    with pytest.raises(ParamError):
        sample_labels(A, 0.5, "columns")


def test_label_sampling_seeded():
    A = np.zeros((6, 6), dtype=int)
    a = sample_labels(A, 0.4, seed=[1, 2]).states
    b = sample_labels(A, 0.4, seed=[1, 2]).states
    assert np.array_equal(a, b)


def test_reachability_matches_matrix_powers():
    for seed in range(10):
        spec = random_sem(12, 0.2, seed=seed)
        B = (spec.weight_matrix() != 0).astype(int)
        R = np.zeros_like(B, dtype=bool)
        P = np.eye(12, dtype=int)
        for _ in range(12):
            P = (P @ B > 0).astype(int)
            R |= P.astype(bool)
        np.fill_diagonal(R, False)
        assert np.array_equal(reachability_gold_standard(spec).A, R.astype(np.int8))
        sub = [1, 4, 7, 9]
        assert np.array_equal(reachability_gold_standard(spec, sub).A, R[np.ix_(sub, sub)])


def test_gold_standard_json_roundtrip():
    spec = random_sem(5, 0.5, seed=1)
    g = reachability_gold_standard(spec)
    back = GoldStandard.from_json(g.to_json())
    assert np.array_equal(back.A, g.A) and back.tau == math.inf
    assert back.provenance == g.provenance


def test_zscore_agrees_with_reachability_on_strong_sparse_graphs():
    cfg = BenchmarkConfig(p=15, p_extra=0, edge_prob=0.1, weight_range=(1.0, 2.0), n_obs=1000, min_density=0.0)
    agree = []
    for seed in range(5):
        b = make_benchmark(cfg, seed)
        off = ~np.eye(cfg.p, dtype=bool)
        agree.append(np.mean(b.gold.A[off] == b.reach.A[off]))
    assert np.mean(agree) >= 0.9


def test_benchmark_deterministic_and_leak_free():
    a = make_benchmark(seed=3)
    b = make_benchmark(seed=3)
    assert np.array_equal(a.gold.A, b.gold.A)
    Xa = a.training_matrix(300, seed=[3, 2, 300])
    Xb = b.training_matrix(300, seed=[3, 2, 300])
    assert np.array_equal(Xa.values, Xb.values)
    assert Xa.n == 300 and Xa.p == 20
    assert density_check(a.gold.A)
    # observational training rows come first and are disjoint from the holdout
    assert np.array_equal(Xa.values[:80], a.obs_train[:, list(a.subset)])
    with pytest.raises(ParamError):
        a.training_matrix(10)
