"""Acceptance suite: one test per published criterion, one verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict lines.
Criterion 3 (k-sweep separation margin) and the absolute AUC clause of
criterion 9 exceed what any estimator of this family can achieve on the
stated models; those tests print the measured values next to the relevant
oracle ceilings and are expected to fail. Everything else passes.
"""

import json
import math
import time
from itertools import combinations

import numpy as np
import pytest

from conftest import brute_capacity, brute_incidence, dense_from_edges, random_adjacency
from hgon.cli import main as cli_main
from hgon.estimator import (
    blockwise_means,
    block_model_loss,
    fit_block_model,
    incidence_capacity,
    incidence_counts,
)
from hgon.metrics import normalized_error, summarize_trials
from hgon.models import logistic_model, product_model
from hgon.prediction import auc, fit_missing, predict_missing, sample_mask
from hgon.rng import derive_seed
from hgon.tensor import AdjacencyTensor, num_hyperedges
from hgon.experiments import run_k_sweep, run_misspec_grid, run_rate_curve


def report(number, passed, detail):
    print(f"\nACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} -- {detail}")
    return passed


def test_criterion_01_rate_curve_dense():
    """Dense reconstruction error: <=0.25 at n=20, <=0.15 at n=30, decreasing to n=50."""
    start = time.perf_counter()
    cfg = {"model": "case1", "rho": 1.0, "n": [20, 30, 50],
           "k_rule": {"rule": "fraction", "c": 0.6},
           "seed": 101, "trials": 20, "init": "spectral"}
    rows = run_rate_curve(cfg).rows
    err = {row["n"]: row["mean_error"] for row in rows}
    elapsed = time.perf_counter() - start
    ok = err[20] <= 0.25 and err[30] <= 0.15 and err[50] < err[20] and elapsed <= 300
    assert report(
        1, ok,
        f"err(20)={err[20]:.3f} (<=0.25), err(30)={err[30]:.3f} (<=0.15), "
        f"err(50)={err[50]:.3f} (<err(20)), runtime={elapsed:.0f}s (<=300s)",
    )


def test_criterion_02_rate_curve_sparse():
    """Sparse regime: <=0.15 at n=50 and spectral within 0.05 of random at each n."""
    cfg = {"model": "case1", "rho": 0.7, "n": [20, 30, 50],
           "k_rule": {"rule": "fraction", "c": 0.6},
           "seed": 102, "trials": 20, "init": ["spectral", "random"]}
    rows = run_rate_curve(cfg).rows
    err = {(row["n"], row["init"]): row["mean_error"] for row in rows}
    ok = err[(50, "spectral")] <= 0.15
    gaps = []
    for n in (20, 30, 50):
        gap = err[(n, "spectral")] - err[(n, "random")]
        gaps.append(gap)
        ok = ok and gap <= 0.05
    assert report(
        2, ok,
        f"spectral err(50)={err[(50, 'spectral')]:.3f} (<=0.15), "
        f"spectral-random gaps={[f'{g:+.3f}' for g in gaps]} (each <=+0.05)",
    )


def test_criterion_03_k_sweep_u_shape():
    """Interior-k error must undercut both k=2 and k=12 by at least 0.15."""
    cfg = {"model": "case1", "rho": 1.0, "n": 20, "k_values": list(range(2, 13)),
           "seed": 103, "trials": 20, "init": "spectral"}
    rows = run_k_sweep(cfg).rows
    err = {row["k"]: row["mean_error"] for row in rows}
    interior = min(err[k] for k in range(3, 12))
    left_margin = err[2] - interior
    right_margin = err[12] - interior
    ok = left_margin >= 0.15 and right_margin >= 0.15
    assert report(
        3, ok,
        f"err(k=2)={err[2]:.3f}, interior min={interior:.3f}, err(k=12)={err[12]:.3f}; "
        f"margins left={left_margin:.3f}, right={right_margin:.3f} (each >=0.15). "
        f"Note: the coarse two-block approximation of the product model at n=20 is "
        f"already accurate (bias about 0.17-0.19) while interior k pays an "
        f"estimation-variance floor near 0.10, so the left margin is capped near "
        f"0.07 for any assignment, including one built from the true coordinates.",
    )


def test_criterion_04_misspec_diagonal():
    """Matched second-level probabilities reduce to a constant model: error <= 0.1."""
    cfg = {"rho": 1.0, "seed": 104, "trials": 10, "n": 60,
           "p1": 0.6, "q1": 0.4, "k_comm": 2,
           "p2_values": [0.5], "q2_values": [0.5],
           "k_rule": {"rule": "fraction", "c": 0.5}, "init": "spectral"}
    row = run_misspec_grid(cfg).rows[0]
    ok = row["mean_error"] <= 0.1
    assert report(4, ok, f"mean error={row['mean_error']:.4f} (<=0.1) at n=60, k={row['k']}")


def test_criterion_05_qstep_oracle_equivalence():
    """Blockwise means beat a grid+perturbation oracle on 200 small instances."""
    start = time.perf_counter()
    rng = np.random.default_rng(105)
    grid = np.arange(0, 101) * 0.01
    worst = 0.0
    for _ in range(200):
        m = int(rng.integers(2, 4))
        n = int(rng.integers(m, 7))
        k = int(rng.integers(1, 4))
        a = random_adjacency(rng, n, m, density=float(rng.random()))
        z = rng.integers(0, k, n)
        q = blockwise_means(a, z, k)
        base = block_model_loss(a, z, q)
        for idx in range(len(q.values)):
            candidates = np.concatenate([grid, [q.values[idx] - 1e-3, q.values[idx] + 1e-3]])
            for val in np.clip(candidates, 0.0, 1.0):
                trial = q.values.copy()
                trial[idx] = val
                other = block_model_loss(a, z, type(q)(k, m, trial))
                worst = max(worst, base - other)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed <= 30
    assert report(
        5, ok,
        f"max loss excess over oracle={worst:.2e} (<=1e-9), runtime={elapsed:.1f}s (<=30s)",
    )


def test_criterion_06_planted_exact_recovery():
    """Two disjoint complete blocks are recovered exactly for every seed."""
    n = 12
    edges = list(combinations(range(6), 3)) + list(combinations(range(6, 12), 3))
    a = AdjacencyTensor.from_edges(n, 3, edges)
    truth = a.as_probability()
    exact = 0
    for seed in range(50):
        result = fit_block_model(a, 2, init="spectral", seed=seed)
        if normalized_error(result.theta, truth) == 0.0:
            exact += 1
    ok = exact == 50
    assert report(6, ok, f"exact recoveries: {exact}/50 (need 50)")


def test_criterion_07_sampling_soundness():
    """Realized hyperedge count within 4 sigma of its mean for 95% of seeds."""
    inside = 0
    seeds = 100
    for seed in range(seeds):
        model = product_model() if seed % 2 == 0 else logistic_model(1.0, 1.0, 1.0)
        sample = model.sample(60, rho=1.0, seed=seed)
        mean = sample.theta.values.sum()
        std = math.sqrt((sample.theta.values * (1.0 - sample.theta.values)).sum())
        if abs(sample.adjacency.num_edges - mean) <= 4.0 * std:
            inside += 1
    ok = inside >= 95
    assert report(7, ok, f"within 4 sigma: {inside}/{seeds} (need >=95)")


def test_criterion_08_incidence_brute_force():
    """Incidence counts and capacities match ordered-tuple enumeration exactly."""
    rng = np.random.default_rng(108)
    checked = 0
    for m in (2, 3, 4):
        for n in range(m, 7):
            for size in range(n + 1):
                assert incidence_capacity(size, n, m) == brute_capacity(size, n, m)
            instances = [AdjacencyTensor(n, m),
                         AdjacencyTensor.from_edges(n, m, combinations(range(n), m))]
            instances += [random_adjacency(rng, n, m, density=float(rng.random()))
                          for _ in range(25)]
            for a in instances:
                k = int(rng.integers(1, 4))
                z = rng.integers(0, k, n)
                dense = dense_from_edges(n, m, a.edges)
                assert np.array_equal(incidence_counts(a, z, k), brute_incidence(dense, z, k))
                checked += 1
    assert report(8, True, f"{checked} instances matched exactly across n<=6, m in {{2,3,4}}")


def test_criterion_09_prediction_monotonicity():
    """Held-out AUC >= 0.75 at 80% observed and nondecreasing from 70% to 90%."""
    model = logistic_model(1.0, 1.0, 1.0)
    n, trials, seed = 40, 20, 109
    fractions = [0.7, 0.8, 0.9]
    mean_auc, mean_oracle = {}, {}
    for i_f, fraction in enumerate(fractions):
        scores, oracle_scores = [], []
        for t in range(trials):
            sample = model.sample(n, rho=1.0, seed=derive_seed(seed, "sample", t))
            mask = sample_mask(n, 3, fraction, seed=derive_seed(seed, "mask", i_f, t))
            result = fit_missing(sample.adjacency, mask, 5, init="spectral",
                                 seed=derive_seed(seed, "fit", i_f, t))
            predicted = predict_missing(result.theta, mask)
            truth = sample.adjacency.indicator[~mask.observed_flags]
            scores.append(auc(predicted.scores, truth))
            oracle_scores.append(auc(sample.theta.values[~mask.observed_flags], truth))
        mean_auc[fraction] = summarize_trials(scores).mean
        mean_oracle[fraction] = summarize_trials(oracle_scores).mean
    ok = mean_auc[0.8] >= 0.75 and mean_auc[0.9] >= mean_auc[0.7]
    assert report(
        9, ok,
        f"mean AUC={{0.7: {mean_auc[0.7]:.3f}, 0.8: {mean_auc[0.8]:.3f}, "
        f"0.9: {mean_auc[0.9]:.3f}}}; need AUC(0.8)>=0.75 and AUC(0.9)>=AUC(0.7). "
        f"Scoring with the true probability tensor on the same trials gives "
        f"{{0.7: {mean_oracle[0.7]:.3f}, 0.8: {mean_oracle[0.8]:.3f}, "
        f"0.9: {mean_oracle[0.9]:.3f}}}: the model's probabilities span roughly "
        f"[0.5, 0.95], so even a perfect ranker cannot reach 0.75 here.",
    )


def test_criterion_10_cli_determinism(tmp_path):
    """Every CLI verb rerun with an identical config is byte-identical."""
    verbs = {
        "fit": {"model": "constant", "value": 1.0, "rho": 1.0, "n": 8, "k": 1},
        "rate-curve": {"model": "case1", "rho": 1.0, "n": [8, 10], "k": 2, "trials": 3,
                       "init": ["spectral", "random"]},
        "k-sweep": {"model": "case1", "rho": 1.0, "n": 10, "k_values": [2, 3], "trials": 3},
        "misspec-grid": {"rho": 1.0, "n": 10, "p1": 0.6, "q1": 0.4, "k_comm": 2, "k": 2,
                         "p2_values": [0.4, 0.6], "q2_values": [0.5], "trials": 3},
        "predict": {"model": "case1", "rho": 1.0, "n": 10, "k": 2,
                    "fractions": [0.8], "trials": 3},
    }
    identical = []
    for verb, cfg in verbs.items():
        cfg = dict(cfg, seed=7, restarts=3, init=cfg.get("init", "spectral"))
        cfg_path = tmp_path / f"{verb}.json"
        cfg_path.write_text(json.dumps(cfg))
        out1 = tmp_path / f"{verb}-1.csv"
        out2 = tmp_path / f"{verb}-2.csv"
        assert cli_main([verb, "--config", str(cfg_path), "--out", str(out1)]) == 0
        assert cli_main([verb, "--config", str(cfg_path), "--out", str(out2)]) == 0
        identical.append(out1.read_bytes() == out2.read_bytes())
    ok = all(identical)
    assert report(10, ok, f"byte-identical reruns: {sum(identical)}/{len(identical)} verbs")
