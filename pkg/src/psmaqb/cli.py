"""Command line entry point: ``psmaqb run`` and ``psmaqb fit``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from .exceptions import PsmaqbError
from .fits import fit_infidelity_power, fit_regret_log2
from .harness import POLICIES, ExperimentConfig, emit, fit_trace, read_trace_csv, run_experiment
from .policy import DEFAULT_WEIGHT_BETA


def _k_arg(value: str):
    return value if value == "theory" else int(value)


def _weight_beta_arg(value: str):
    return value if value == "theory" else float(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psmaqb", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a seeded multi-episode experiment")
    run.add_argument("--policy", choices=POLICIES, default="linucb-vvn")
    run.add_argument("--T", type=int, default=40_000, help="measurements per episode")
    run.add_argument("--k", type=_k_arg, default=10, help="subsamples per action, or 'theory'")
    run.add_argument("--runs", type=int, default=100)
    run.add_argument("--seed", type=int, default=0, help="master seed")
    run.add_argument("--lambda0", type=float, default=2.0)
    run.add_argument("--dim", type=int, default=3, help="length of the parameter vector")
    run.add_argument("--noise", choices=("born", "gaussian"), default="born")
    run.add_argument("--env", default="random", help="'random' or 'fixed:x,y,z'")
    run.add_argument("--alpha", type=float, default=None, help="ETC exploration fraction (default 1/sqrt(T))")
    run.add_argument("--explore", choices=("fixed_basis", "random_directions"), default="fixed_basis")
    run.add_argument("--weight-beta", type=_weight_beta_arg, default=DEFAULT_WEIGHT_BETA)
    run.add_argument("--window", choices=("second_half", "all"), default="second_half")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--deterministic", action="store_true", help="omit timestamp and wall-clock")

    fit = sub.add_parser("fit", help="fit a regression to an existing trace.csv")
    fit.add_argument("--in", dest="path", required=True)
    fit.add_argument("--model", choices=("log2", "power"), required=True)
    fit.add_argument("--column", default=None, help="y column (default regret_cl_mean or infidelity_mean)")
    fit.add_argument("--window", choices=("second_half", "all"), default="second_half")
    return parser


def _cmd_run(args) -> int:
    cfg = ExperimentConfig(
        policy=args.policy,
        T=args.T,
        k=args.k,
        runs=args.runs,
        master_seed=args.seed,
        lambda0=args.lambda0,
        n_dim=args.dim,
        noise=args.noise,
        env=args.env,
        alpha=args.alpha,
        explore_scheme=args.explore,
        weight_beta=args.weight_beta,
        fit_window=args.window,
        workers=args.workers,
    )
    start = time.perf_counter()
    trace = run_experiment(cfg)
    fits = fit_trace(trace, cfg)
    paths = emit(trace, fits, cfg, args.out, deterministic=args.deterministic, wall_clock=time.perf_counter() - start)
    for name, f in fits.items():
        print(f"{name}: m={f.m:.4f} b={f.b:.4f} r2={f.r2:.4f}")
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_fit(args) -> int:
    data = read_trace_csv(args.path)
    if args.model == "log2":
        res = fit_regret_log2(data["t"], data[args.column or "regret_cl_mean"], args.window)
    else:
        res = fit_infidelity_power(data["t"], data[args.column or "infidelity_mean"], args.window)
    print(json.dumps(res.as_dict(), indent=2))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return _cmd_run(args) if args.command == "run" else _cmd_fit(args)
    except (PsmaqbError, ValueError, KeyError, OSError) as exc:
        print(f"psmaqb: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
