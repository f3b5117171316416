"""Command line entry point.

Exit codes: 0 success, 1 configuration or usage error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

import numpy as np

from ..algorithms import AlgoConfig, IterationTrace
from ..analysis import analysis_report, write_report
from ..errors import ArgumentError, ConfigError, RHTPError
from ..matio import load, read_vector
from ..regularizers import Regularizer
from ..sensing import ProblemInstance, ric_estimate
from .config import ExperimentConfig
from .presets import PRESETS, preset
from .sweep import CSV_HEADER, read_results_csv, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse exits with 2 by default; usage problems are config errors here
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


# flags mirror config keys; each maps to its parser
OVERRIDES = {
    "n": int,
    "m": _int_list,
    "K": _int_list,
    "num_trials": int,
    "seed": int,
    "success_tol": float,
    "max_iters": int,
    "noise_std": float,
    "output_dir": str,
    "workers": int,
    "name": str,
}


def _add_overrides(p):
    for key, typ in OVERRIDES.items():
        p.add_argument(f"--{key}", type=typ, default=None, help=f"override config key {key}")
    p.add_argument("--save_traces", action="store_true", default=None)
    p.add_argument(
        "--trace-full", dest="trace_full", action="store_true", default=None,
        help="embed full iterate vectors in saved traces",
    )


def _apply_overrides(cfg: dict, args) -> dict:
    cfg = dict(cfg)
    for key in list(OVERRIDES) + ["save_traces", "trace_full"]:
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rhtp", description="RHTP sparse recovery experiments")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="execute an experiment config")
    p.add_argument("--config", required=True)
    _add_overrides(p)

    p = sub.add_parser("preset", help="emit a named preset config")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--output", help="write here instead of stdout")
    _add_overrides(p)

    p = sub.add_parser("analyze", help="run the theory checkers over a stored trace")
    p.add_argument("--trace", required=True, help="JSON-lines trace written with full vectors")
    p.add_argument("--matrix", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--x-star", dest="x_star")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--algorithm", default="rhtp", choices=["rhtp", "htp", "iht"])
    p.add_argument("--q", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--output")

    p = sub.add_parser("ric", help="restricted isometry constant of a stored matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--mode", default="exact", choices=["exact", "randomized"])
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("report", help="merge result CSVs into plot-ready data")
    p.add_argument("inputs", nargs="+", help="results.csv files or directories holding one")
    p.add_argument("--output", required=True, help="output directory")
    return parser


def _cmd_run(args) -> int:
    data = ExperimentConfig.load(args.config).to_dict()
    cfg = ExperimentConfig.from_dict(_apply_overrides(data, args))
    rows = run_sweep(cfg)
    print(f"wrote {len(rows)} rows to {os.path.join(cfg.output_dir, 'results.csv')}")
    return EXIT_OK


def _cmd_preset(args) -> int:
    cfg = ExperimentConfig.from_dict(_apply_overrides(preset(args.name), args))
    text = cfg.to_json()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_analyze(args) -> int:
    phi = load(args.matrix)
    y = read_vector(args.y)
    x_star = read_vector(args.x_star) if args.x_star else None
    inst = ProblemInstance(phi, y, args.K, x_star=x_star)
    if args.algorithm == "rhtp" and args.q is not None:
        if args.eps is None or args.gamma is None:
            raise ConfigError("--q needs --eps and --gamma")
        reg = Regularizer.smooth_power(args.q, args.eps, args.gamma, inst.n)
    else:
        reg = Regularizer.zero(inst.n)
    cfg = AlgoConfig(mu=args.mu, K=args.K, algorithm=args.algorithm, reg=reg)
    trace = IterationTrace.read_jsonl(args.trace)
    if any(np.isnan(r.x).any() or r.x.size != inst.n for r in trace.records):
        raise ConfigError(f"{args.trace}: trace lacks full iterates")
    doc = analysis_report(trace, inst, cfg)
    if args.output:
        write_report(doc, args.output)
    else:
        print(json.dumps(doc, indent=2))
    return EXIT_OK


def _cmd_ric(args) -> int:
    phi = load(args.matrix)
    rng = np.random.default_rng(args.seed) if args.mode == "randomized" else None
    est = ric_estimate(phi, args.order, args.mode, num_samples=args.samples, rng=rng)
    kind = "exact" if est.exact else "lower bound"
    print(f"delta_{est.order} = {est.value!r} ({kind}, {est.supports_checked} supports)")
    return EXIT_OK


def _cmd_report(args) -> int:
    rows = []
    for item in args.inputs:
        path = os.path.join(item, "results.csv") if os.path.isdir(item) else item
        if not os.path.exists(path):
            raise ConfigError(f"no results file at {path}")
        rows.extend(read_results_csv(path))
    os.makedirs(args.output, exist_ok=True)
    rows.sort(key=lambda r: (r["algo"], int(r["m"]), int(r["K"])))
    with open(os.path.join(args.output, "combined.csv"), "w") as fh:
        fh.write(",".join(CSV_HEADER) + "\n")
        for r in rows:
            fh.write(",".join(r[h] for h in CSV_HEADER) + "\n")
    curves = {}
    for r in rows:
        for axis, other in (("K", "m"), ("m", "K")):
            for stat in ("prob_recovery", "mean_iters"):
                key = f"{stat}_vs_{axis}_{r['algo']}_{other}{r[other]}"
                curves.setdefault(key, []).append((int(r[axis]), r[stat]))
    for key, pts in curves.items():
        if len(pts) < 2:
            continue
        with open(os.path.join(args.output, key + ".dat"), "w") as fh:
            for x, v in sorted(pts):
                fh.write(f"{x} {v}\n")
    print(f"merged {len(rows)} rows into {args.output}")
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "preset": _cmd_preset,
    "analyze": _cmd_analyze,
    "ric": _cmd_ric,
    "report": _cmd_report,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ArgumentError, FileNotFoundError) as exc:
        print(f"rhtp {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RHTPError, OSError, ValueError) as exc:
        print(f"rhtp {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
