"""Experiment runners behind the CLI verbs.

Each runner turns a validated config dictionary into a deterministic table
of rows (plus optional wall-clock timings, kept out of the primary output so
reruns are byte-identical). Trials execute independently with derived seeds
and may be spread over worker processes.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .estimator import fit_block_model, rate_optimal_k
from .metrics import normalized_error, summarize_trials
from .models import model_from_config
from .prediction import (
    auc,
    fit_missing,
    load_hyperedge_list,
    predict_missing,
    sample_mask,
    save_predictions,
)
from .rng import derive_seed
from .tensor import load_adjacency

__all__ = [
    "ConfigError",
    "ExperimentResult",
    "run_fit_once",
    "run_k_sweep",
    "run_misspec_grid",
    "run_predict_sweep",
    "run_rate_curve",
    "write_csv",
    "write_json",
]


class ConfigError(Exception):
    """Raised for malformed or inconsistent experiment configs."""


@dataclass
class ExperimentResult:
    columns: list
    rows: list
    timing_columns: list = field(default_factory=list)
    timing_rows: list = field(default_factory=list)
    predictions: object = None


def _get_int(cfg, key, default=None, minimum=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"config key {key!r} is required")
        return default
    try:
        value = int(cfg[key])
    except (TypeError, ValueError):
        raise ConfigError(f"config key {key!r} must be an integer") from None
    if minimum is not None and value < minimum:
        raise ConfigError(f"config key {key!r} must be at least {minimum}, got {value}")
    return value


def _get_float(cfg, key, default=None, low=None, high=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"config key {key!r} is required")
        return default
    try:
        value = float(cfg[key])
    except (TypeError, ValueError):
        raise ConfigError(f"config key {key!r} must be a number") from None
    if low is not None and value < low or high is not None and value > high:
        raise ConfigError(f"config key {key!r} out of range: {value}")
    return value


def _get_list(cfg, key, kind=float, minimum_len=1):
    if key not in cfg:
        raise ConfigError(f"config key {key!r} is required")
    raw = cfg[key]
    if not isinstance(raw, (list, tuple)) or len(raw) < minimum_len:
        raise ConfigError(f"config key {key!r} must be a list of at least {minimum_len}")
    try:
        return [kind(v) for v in raw]
    except (TypeError, ValueError):
        raise ConfigError(f"config key {key!r} has non-{kind.__name__} entries") from None


def _model_cfg(cfg):
    try:
        model_from_config(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    keys = ("model", "c", "value", "p1", "q1", "p2", "q2", "k_comm", "m")
    return {key: cfg[key] for key in keys if key in cfg}


def _common(cfg):
    return {
        "rho": _get_float(cfg, "rho", default=1.0, low=0.0, high=1.0),
        "seed": _get_int(cfg, "seed", default=0, minimum=0),
        "trials": _get_int(cfg, "trials", default=50, minimum=1),
        "restarts": _get_int(cfg, "restarts", default=10, minimum=1),
        "max_iters": _get_int(cfg, "max_iters", default=100, minimum=1),
    }


def _init_list(cfg, allow_multi=True):
    raw = cfg.get("init", "spectral")
    if isinstance(raw, str):
        inits = ["spectral", "random"] if raw == "both" else [raw]
    elif isinstance(raw, (list, tuple)) and raw:
        inits = [str(v) for v in raw]
    else:
        raise ConfigError('config key "init" must be a string or list of strings')
    for name in inits:
        if name not in ("spectral", "random"):
            raise ConfigError(f'init must be "spectral" or "random", got {name!r}')
    if not allow_multi and len(inits) != 1:
        raise ConfigError("this experiment takes a single init")
    return inits


def resolve_k(cfg, n, m, rho):
    """Block count from an explicit "k" or a "k_rule" entry.

    Rules: {"rule": "theoretical"} uses the rate-optimal count;
    {"rule": "fraction", "c": c} uses round(c * n^(m/(m+2)));
    {"rule": "literal", "c": c} uses round(c * n^m) clamped to [1, n].
    Defaults to the fraction rule with c = 0.6.
    """
    if "k" in cfg:
        k = _get_int(cfg, "k", minimum=1)
        if k > n:
            raise ConfigError(f"k={k} exceeds n={n}")
        return k
    rule = cfg.get("k_rule", {"rule": "fraction", "c": 0.6})
    if not isinstance(rule, dict) or "rule" not in rule:
        raise ConfigError('config key "k_rule" must be {"rule": ..., ...}')
    name = rule["rule"]
    if name == "theoretical":
        if rho <= 0.0:
            raise ConfigError("theoretical k rule needs rho > 0")
        return rate_optimal_k(n, m, rho)
    if name in ("fraction", "literal"):
        try:
            c = float(rule["c"])
        except (KeyError, TypeError, ValueError):
            raise ConfigError(f'k rule {name!r} needs a numeric "c"') from None
        exponent = m / (m + 2) if name == "fraction" else m
        return min(max(round(c * n**exponent), 1), n)
    raise ConfigError(f"unknown k rule {name!r}")


def _fmt(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def write_csv(path, columns, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(col, "")) for col in columns) + "\n")


def write_json(path, columns, rows):
    import json

    payload = [{col: row.get(col, "") for col in columns} for row in rows]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _summary(values):
    if len(values) == 1:
        return float(values[0]), float("nan")
    summary = summarize_trials(values)
    return summary.mean, summary.std_error


def _map_trials(fn, payloads, threads):
    if threads <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, payloads, chunksize=1))


def _reconstruction_trial(payload):
    model = model_from_config(payload["model_cfg"])
    sample = model.sample(payload["n"], payload["rho"], seed=payload["sample_seed"])
    start = time.perf_counter()
    result = fit_block_model(
        sample.adjacency,
        payload["k"],
        init=payload["init"],
        restarts=payload["restarts"],
        max_iters=payload["max_iters"],
        seed=payload["fit_seed"],
    )
    elapsed = time.perf_counter() - start
    return normalized_error(result.theta, sample.theta), elapsed


def _prediction_trial(payload):
    model = model_from_config(payload["model_cfg"])
    sample = model.sample(payload["n"], payload["rho"], seed=payload["sample_seed"])
    mask = sample_mask(sample.adjacency.n, sample.adjacency.m, payload["fraction"],
                       seed=payload["mask_seed"])
    start = time.perf_counter()
    result = fit_missing(
        sample.adjacency,
        mask,
        payload["k"],
        init=payload["init"],
        restarts=payload["restarts"],
        max_iters=payload["max_iters"],
        seed=payload["fit_seed"],
    )
    elapsed = time.perf_counter() - start
    predicted = predict_missing(result.theta, mask)
    truth = sample.adjacency.indicator[~mask.observed_flags]
    return auc(predicted.scores, truth), elapsed


def run_rate_curve(cfg, threads=1):
    """Reconstruction error versus the number of vertices."""
    common = _common(cfg)
    model_cfg = _model_cfg(cfg)
    inits = _init_list(cfg)
    n_values = _get_list(cfg, "n", kind=int)
    m = _get_int(cfg, "m", default=3)
    k_for = {}
    for n in n_values:
        if n < 3:
            raise ConfigError(f"n must be at least 3, got {n}")
        k_for[n] = resolve_k(cfg, n, m, common["rho"])
    payloads = []
    for i_n, n in enumerate(n_values):
        for i_init, init in enumerate(inits):
            for t in range(common["trials"]):
                payloads.append({
                    "model_cfg": model_cfg, "n": n, "rho": common["rho"], "k": k_for[n],
                    "init": init, "restarts": common["restarts"],
                    "max_iters": common["max_iters"],
                    "sample_seed": derive_seed(common["seed"], "sample", i_n, t),
                    "fit_seed": derive_seed(common["seed"], "fit", i_n, i_init, t),
                })
    outcomes = _map_trials(_reconstruction_trial, payloads, threads)
    rows, timing_rows = [], []
    idx = 0
    for i_n, n in enumerate(n_values):
        for init in inits:
            chunk = outcomes[idx : idx + common["trials"]]
            idx += common["trials"]
            errors = [c[0] for c in chunk]
            seconds = [c[1] for c in chunk]
            mean, std_error = _summary(errors)
            rows.append({
                "n": n, "init": init, "k": k_for[n],
                "trials": common["trials"], "mean_error": mean, "std_error": std_error,
            })
            timing_rows.append({
                "n": n, "init": init,
                "mean_seconds": math.fsum(seconds) / len(seconds),
            })
    return ExperimentResult(
        ["n", "init", "k", "trials", "mean_error", "std_error"], rows,
        ["n", "init", "mean_seconds"], timing_rows,
    )


def run_k_sweep(cfg, threads=1):
    """Reconstruction error versus the number of blocks, at a fixed size."""
    common = _common(cfg)
    model_cfg = _model_cfg(cfg)
    inits = _init_list(cfg)
    n = _get_int(cfg, "n", minimum=3)
    m = _get_int(cfg, "m", default=3)
    if "k_values" in cfg:
        k_values = _get_list(cfg, "k_values", kind=int)
    elif "k_fractions" in cfg:
        fractions = _get_list(cfg, "k_fractions", kind=float)
        k_values = [max(round(c * n ** (m / (m + 2))), 1) for c in fractions]
    else:
        raise ConfigError('k-sweep needs "k_values" or "k_fractions"')
    payloads = []
    live = [(i_k, k) for i_k, k in enumerate(k_values) if 1 <= k <= n]
    for i_k, k in live:
        for i_init, init in enumerate(inits):
            for t in range(common["trials"]):
                payloads.append({
                    "model_cfg": model_cfg, "n": n, "rho": common["rho"], "k": k,
                    "init": init, "restarts": common["restarts"],
                    "max_iters": common["max_iters"],
                    "sample_seed": derive_seed(common["seed"], "sample", t),
                    "fit_seed": derive_seed(common["seed"], "fit", i_k, i_init, t),
                })
    outcomes = _map_trials(_reconstruction_trial, payloads, threads)
    rows, timing_rows = [], []
    idx = 0
    for i_k, k in enumerate(k_values):
        for init in inits:
            if not 1 <= k <= n:
                rows.append({"k": k, "init": init, "status": "skipped",
                             "trials": 0, "mean_error": "", "std_error": ""})
                continue
            chunk = outcomes[idx : idx + common["trials"]]
            idx += common["trials"]
            mean, std_error = _summary([c[0] for c in chunk])
            seconds = [c[1] for c in chunk]
            rows.append({"k": k, "init": init, "status": "ok",
                         "trials": common["trials"],
                         "mean_error": mean, "std_error": std_error})
            timing_rows.append({"k": k, "init": init,
                                "mean_seconds": math.fsum(seconds) / len(seconds)})
    return ExperimentResult(
        ["k", "init", "status", "trials", "mean_error", "std_error"], rows,
        ["k", "init", "mean_seconds"], timing_rows,
    )


def run_misspec_grid(cfg, threads=1):
    """Error of the simple-model fit on the piecewise-constant full model."""
    common = _common(cfg)
    init = _init_list(cfg, allow_multi=False)[0]
    n = _get_int(cfg, "n", minimum=3)
    p1 = _get_float(cfg, "p1", low=0.0, high=1.0)
    q1 = _get_float(cfg, "q1", low=0.0, high=1.0)
    k_comm = _get_int(cfg, "k_comm", minimum=1)
    p2_values = _get_list(cfg, "p2_values", kind=float)
    q2_values = _get_list(cfg, "q2_values", kind=float)
    k = resolve_k(cfg, n, 3, common["rho"])
    payloads = []
    for i_p, p2 in enumerate(p2_values):
        for i_q, q2 in enumerate(q2_values):
            cell_cfg = {"model": "full", "p1": p1, "q1": q1, "p2": p2, "q2": q2,
                        "k_comm": k_comm}
            _model_cfg(cell_cfg)
            for t in range(common["trials"]):
                payloads.append({
                    "model_cfg": cell_cfg, "n": n, "rho": common["rho"], "k": k,
                    "init": init, "restarts": common["restarts"],
                    "max_iters": common["max_iters"],
                    "sample_seed": derive_seed(common["seed"], "sample", i_p, i_q, t),
                    "fit_seed": derive_seed(common["seed"], "fit", i_p, i_q, t),
                })
    outcomes = _map_trials(_reconstruction_trial, payloads, threads)
    rows, timing_rows = [], []
    idx = 0
    for p2 in p2_values:
        for q2 in q2_values:
            chunk = outcomes[idx : idx + common["trials"]]
            idx += common["trials"]
            mean, std_error = _summary([c[0] for c in chunk])
            seconds = [c[1] for c in chunk]
            rows.append({"p2": p2, "q2": q2, "k": k, "trials": common["trials"],
                         "mean_error": mean, "std_error": std_error})
            timing_rows.append({"p2": p2, "q2": q2,
                                "mean_seconds": math.fsum(seconds) / len(seconds)})
    return ExperimentResult(
        ["p2", "q2", "k", "trials", "mean_error", "std_error"], rows,
        ["p2", "q2", "mean_seconds"], timing_rows,
    )


def run_predict_sweep(cfg, threads=1):
    """Held-out AUC versus the observed fraction, or file-based prediction.

    With an "input" hyperedge-list file the runner fits once on the observed
    entries and returns per-hyperedge predictions instead of a sweep table.
    """
    common = _common(cfg)
    init = _init_list(cfg, allow_multi=False)[0]
    if "input" in cfg:
        a, mask = load_hyperedge_list(cfg["input"])
        if mask.num_observed == math.comb(a.n, a.m):
            raise ValueError("nothing to predict: every hyperedge is observed")
        k = resolve_k(cfg, a.n, a.m, common["rho"])
        result = fit_missing(a, mask, k, init=init, restarts=common["restarts"],
                             max_iters=common["max_iters"],
                             seed=derive_seed(common["seed"], "fit", 0))
        predicted = predict_missing(result.theta, mask)
        return ExperimentResult([], [], predictions=predicted)
    model_cfg = _model_cfg(cfg)
    n = _get_int(cfg, "n", minimum=3)
    m = _get_int(cfg, "m", default=3)
    fractions = _get_list(cfg, "fractions", kind=float)
    for fraction in fractions:
        if not 0.0 < fraction <= 1.0:
            raise ConfigError(f"observed fraction out of (0, 1]: {fraction}")
        if fraction >= 1.0:
            raise ValueError("nothing to predict: fraction 1 observes every hyperedge")
    k = resolve_k(cfg, n, m, common["rho"])
    payloads = []
    for i_f, fraction in enumerate(fractions):
        for t in range(common["trials"]):
            payloads.append({
                "model_cfg": model_cfg, "n": n, "rho": common["rho"], "k": k,
                "init": init, "restarts": common["restarts"],
                "max_iters": common["max_iters"], "fraction": fraction,
                "sample_seed": derive_seed(common["seed"], "sample", t),
                "mask_seed": derive_seed(common["seed"], "mask", i_f, t),
                "fit_seed": derive_seed(common["seed"], "fit", i_f, t),
            })
    outcomes = _map_trials(_prediction_trial, payloads, threads)
    rows, timing_rows = [], []
    idx = 0
    for fraction in fractions:
        chunk = outcomes[idx : idx + common["trials"]]
        idx += common["trials"]
        mean, std_error = _summary([c[0] for c in chunk])
        seconds = [c[1] for c in chunk]
        rows.append({"fraction": fraction, "k": k, "trials": common["trials"],
                     "mean_auc": mean, "std_error": std_error})
        timing_rows.append({"fraction": fraction,
                            "mean_seconds": math.fsum(seconds) / len(seconds)})
    return ExperimentResult(
        ["fraction", "k", "trials", "mean_auc", "std_error"], rows,
        ["fraction", "mean_seconds"], timing_rows,
    )


def run_fit_once(cfg, threads=1):
    """Single fit on a sampled or loaded tensor, reported as one summary row."""
    common = _common(cfg)
    init = _init_list(cfg, allow_multi=False)[0]
    start = time.perf_counter()
    if "input" in cfg:
        a = load_adjacency(cfg["input"])
        theta_bar = None
    else:
        model = model_from_config(_model_cfg(cfg))
        n = _get_int(cfg, "n", minimum=3)
        sample = model.sample(n, common["rho"], seed=derive_seed(common["seed"], "sample", 0))
        a, theta_bar = sample.adjacency, sample.theta
    k = resolve_k(cfg, a.n, a.m, common["rho"])
    result = fit_block_model(a, k, init=init, restarts=common["restarts"],
                             max_iters=common["max_iters"],
                             seed=derive_seed(common["seed"], "fit", 0))
    elapsed = time.perf_counter() - start
    row = {
        "n": a.n, "m": a.m, "k": k, "init": init, "num_edges": a.num_edges,
        "loss": result.loss, "n_iter": result.n_iter, "converged": result.converged,
        "normalized_error": normalized_error(result.theta, theta_bar)
        if theta_bar is not None else "",
    }
    columns = ["n", "m", "k", "init", "num_edges", "loss", "n_iter", "converged",
               "normalized_error"]
    return ExperimentResult(columns, [row], ["seconds"], [{"seconds": elapsed}])
