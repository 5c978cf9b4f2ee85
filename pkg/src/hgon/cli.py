"""Command-line experiment runner.

Verbs: fit, rate-curve, k-sweep, misspec-grid, predict. Every verb reads a
JSON config, writes a CSV table to --out, and exits 0 on success, 2 on a
config error, 3 on a runtime rejection. Outputs are byte-identical across
reruns of the same config; wall-clock timings go to the opt-in --timings
file, which is excluded from that guarantee.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .experiments import (
    ConfigError,
    run_fit_once,
    run_k_sweep,
    run_misspec_grid,
    run_predict_sweep,
    run_rate_curve,
    write_csv,
    write_json,
)
from .prediction import save_predictions

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

_RUNNERS = {
    "fit": run_fit_once,
    "rate-curve": run_rate_curve,
    "k-sweep": run_k_sweep,
    "misspec-grid": run_misspec_grid,
    "predict": run_predict_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hgon",
        description="Sample m-uniform random hypergraphs and fit block-model "
                    "probability tensors.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in _RUNNERS:
        sp = sub.add_parser(verb)
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--out", required=True, help="output CSV path")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--trials", type=int, help="override the config trial count")
        sp.add_argument("--threads", type=int, default=1,
                        help="worker processes (HGON_THREADS overrides)")
        sp.add_argument("--json", dest="json_out", help="also write rows as JSON")
        sp.add_argument("--timings", help="write wall-clock timings to this CSV")
    return parser


def _load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _threads(args) -> int:
    env = os.environ.get("HGON_THREADS")
    if env is not None:
        try:
            return max(int(env), 1)
        except ValueError:
            raise ConfigError(f"HGON_THREADS must be an integer, got {env!r}") from None
    return max(args.threads, 1)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.trials is not None:
            cfg["trials"] = args.trials
        threads = _threads(args)
        result = _RUNNERS[args.verb](cfg, threads=threads)
    except ConfigError as exc:
        print(f"hgon: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"hgon: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if result.predictions is not None:
        save_predictions(result.predictions, args.out)
    else:
        write_csv(args.out, result.columns, result.rows)
        if args.json_out:
            write_json(args.json_out, result.columns, result.rows)
    if args.timings and result.timing_rows:
        write_csv(args.timings, result.timing_columns, result.timing_rows)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
