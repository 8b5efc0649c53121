"""Command-line interface.

Subcommands:
  run     execute one experiment cell and report/emit the aggregate
  sweep   execute a grid of cells (comma-separated value lists)
  probe   run the statistical probes of the selection and mutation structure
  oracle  print the exact Pareto front of an objective

Exit codes: 0 success, 1 configuration error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .core import ConfigError, pareto_front_oracle
from .experiments import (
    ExperimentConfig,
    build_grid,
    emit_outputs,
    reports_to_csv,
    reports_to_json,
    run_batch,
    sweep,
)
from .noise import NoiseModel
from .probes import estimate_mutation_to_front, crowding_bound_probe, shrinking_probe


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _add_common(sub, many: bool) -> None:
    sub.add_argument("--algorithm", choices=["nsga2", "gsemo"], required=True)
    if many:
        sub.add_argument("--objective", type=_str_list, required=True,
                         help="comma-separated list from {lotz,omm}")
        sub.add_argument("--n", type=_int_list, required=True)
    else:
        sub.add_argument("--objective", choices=["lotz", "omm"], required=True)
        sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--mu", type=int, default=None,
                     help="NSGA-II population size (default 9(n+1))")
    sub.add_argument("--pc", type=float, default=0.9)
    sub.add_argument("--crossover", choices=["onepoint", "uniform"], default="onepoint")
    sub.add_argument("--noise", choices=["none", "bernoulli", "gaussian"], default="none")
    sub.add_argument("--delta", type=float, default=None,
                     help="Bernoulli noise strength (default n+1)")
    if many:
        sub.add_argument("--p", type=_float_list, default=[],
                         help="comma-separated Bernoulli noise probabilities")
        sub.add_argument("--sigma", type=_float_list, default=[],
                         help="comma-separated Gaussian standard deviations")
    else:
        sub.add_argument("--p", type=float, default=None)
        sub.add_argument("--sigma", type=float, default=None)
    sub.add_argument("--runs", type=int, default=50)
    sub.add_argument("--budget", type=int, default=None, help="default 10 n^3")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--trace", action="store_true",
                     help="record per-generation (gen, evals, coverage, pop size)")
    sub.add_argument("--out", default=None, help="output file path")
    sub.add_argument("--format", choices=["csv", "json"], default="csv")
    sub.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="noisymoea")
    subs = parser.add_subparsers(dest="command", required=True)

    _add_common(subs.add_parser("run", help="run one experiment cell"), many=False)
    _add_common(subs.add_parser("sweep", help="run a grid of cells"), many=True)

    probe = subs.add_parser("probe", help="statistical probes of the selection and mutation structure")
    probe.add_argument("--probe", choices=["mutation", "crowding", "shrinking", "all"],
                       default="all")
    probe.add_argument("--n", type=int, default=40)
    probe.add_argument("--trials", type=int, default=1_000_000)
    probe.add_argument("--generations", type=int, default=1000,
                       help="NSGA-II generations sampled by the crowding-bound probe")
    probe.add_argument("--p", type=float, default=0.25)
    probe.add_argument("--seed", type=int, default=0)
    probe.add_argument("--out", default=None)

    oracle = subs.add_parser("oracle", help="print the exact Pareto front")
    oracle.add_argument("--objective", choices=["lotz", "omm"], required=True)
    oracle.add_argument("--n", type=int, required=True)
    return parser


def _noise_from_args(args, n: int, p=None, sigma=None) -> NoiseModel:
    if args.noise == "none":
        return NoiseModel.none()
    if args.noise == "bernoulli":
        if p is None:
            raise ConfigError("Bernoulli noise requires --p")
        delta = args.delta if args.delta is not None else n + 1
        return NoiseModel.bernoulli(delta, p)
    if sigma is None:
        raise ConfigError("Gaussian noise requires --sigma")
    return NoiseModel.gaussian(sigma)


def _cmd_run(args) -> int:
    config = ExperimentConfig(
        algorithm=args.algorithm,
        objective=args.objective,
        n=args.n,
        noise=_noise_from_args(args, args.n, p=args.p, sigma=args.sigma),
        mu=args.mu,
        pc=args.pc,
        crossover=args.crossover,
        runs=args.runs,
        budget=args.budget,
        seed=args.seed,
        trace=args.trace,
    )
    report = run_batch(config, workers=args.workers)
    if args.out:
        emit_outputs([report], args.format, args.out)
    else:
        if args.format == "csv":
            sys.stdout.write(reports_to_csv([report]))
        else:
            sys.stdout.write(reports_to_json([report], {"seed": args.seed}) + "\n")
    return 0


def _cmd_sweep(args) -> int:
    common = dict(
        mu=args.mu,
        pc=args.pc,
        crossover=args.crossover,
        runs=args.runs,
        budget=args.budget,
        seed=args.seed,
        trace=args.trace,
    )
    cells = build_grid(
        algorithm=args.algorithm,
        objectives=args.objective,
        ns=args.n,
        noise_kind=args.noise,
        ps=args.p,
        sigmas=args.sigma,
        delta=args.delta,
        **common,
    )
    reports = sweep(cells, workers=args.workers)
    if args.out:
        emit_outputs(reports, args.format, args.out)
    else:
        if args.format == "csv":
            sys.stdout.write(reports_to_csv(reports))
        else:
            sys.stdout.write(reports_to_json(reports, {"seed": args.seed}) + "\n")
    return 0


def _cmd_probe(args) -> int:
    import numpy as np

    reports = {}
    if args.probe in ("mutation", "all"):
        rng = np.random.Generator(np.random.PCG64([args.seed, 1]))
        reports["mutation_to_front"] = [
            dataclasses.asdict(
                estimate_mutation_to_front(args.n, cls, args.trials, rng)
            )
            for cls in ("onfront", "offfront")
        ]
    if args.probe in ("crowding", "all"):
        reports["crowding_bound"] = dataclasses.asdict(
            crowding_bound_probe(min(args.n, 20), args.p, args.generations, seed=args.seed)
        )
    if args.probe in ("shrinking", "all"):
        reports["shrinking_steps"] = dataclasses.asdict(
            shrinking_probe(min(args.n, 20), args.p, seed=args.seed)
        )
    payload = json.dumps(reports, indent=2, sort_keys=True)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(payload)
        except OSError as exc:
            raise OSError(f"cannot write output file {args.out!r}: {exc}") from exc
    else:
        print(payload)
    return 0


def _cmd_oracle(args) -> int:
    front = sorted(pareto_front_oracle(args.objective, args.n))
    for vec in front:
        print(f"{vec[0]} {vec[1]}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "run": _cmd_run,
            "sweep": _cmd_sweep,
            "probe": _cmd_probe,
            "oracle": _cmd_oracle,
        }[args.command]
        return handler(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
