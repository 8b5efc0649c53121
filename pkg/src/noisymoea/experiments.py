"""Batch execution: single runs, aggregated cells, grid sweeps, and
CSV/JSON emission.

Seeding: every cell derives a seed from (base seed, cell coordinates)
via SHA-256, and every run from (cell seed, run index). Results are
therefore independent of execution order and worker count.

Evaluation accounting: initialisation costs mu (NSGA-II) or 1 (GSEMO)
evaluations; each generation costs 2*mu (NSGA-II: parent re-draws plus
offspring) or 1 + |P_t| (GSEMO: offspring plus archive re-draws). A run
stops after the first generation that covers the true Pareto front or
pushes the evaluation count past the budget, so budget-exhausted runs
overshoot by at most one generation. Capped evaluation counts of failed
runs are included in the aggregate statistics.
"""

from __future__ import annotations

import concurrent.futures
import csv
import hashlib
import io
import json
import statistics
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import ConfigError
from .gsemo import GsemoConfig, gsemo_init, run_gsemo
from .noise import NoiseModel
from .nsga2 import Nsga2Config, front_coverage, nsga2_generation, nsga2_init
from .objectives import ObjectiveId

ALGORITHMS = ("nsga2", "gsemo")

CSV_COLUMNS = [
    "algorithm",
    "objective",
    "n",
    "mu",
    "pc",
    "noise_kind",
    "delta",
    "p",
    "sigma",
    "runs",
    "success_rate",
    "mean_evals",
    "median_evals",
    "stddev_evals",
    "budget",
    "seed",
]


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str
    objective: ObjectiveId
    n: int
    noise: NoiseModel
    mu: Optional[int] = None          # NSGA-II only; None -> 9(n+1)
    pc: float = 0.9
    crossover: str = "onepoint"
    mutation_rate: Optional[float] = None
    runs: int = 50
    budget: Optional[int] = None      # None -> 10 n^3
    seed: int = 0
    trace: bool = False

    def __post_init__(self):
        object.__setattr__(self, "objective", ObjectiveId.parse(self.objective))
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm: {self.algorithm!r}")
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if self.budget is not None and self.budget < 1:
            raise ConfigError(f"budget must be >= 1, got {self.budget}")
        # validate algorithm parameters eagerly
        if self.algorithm == "nsga2":
            Nsga2Config(
                mu=self.resolved_mu, pc=self.pc, crossover=self.crossover,
                mutation_rate=self.mutation_rate,
            ).validate()
        else:
            GsemoConfig(
                pc=self.pc, crossover=self.crossover, mutation_rate=self.mutation_rate
            ).validate()

    @property
    def resolved_mu(self) -> Optional[int]:
        if self.algorithm != "nsga2":
            return None
        if self.mu is not None:
            return self.mu
        # offspring are produced in pairs, so the 9(n+1) default is
        # rounded up to the next even number when 9(n+1) is odd
        mu = 9 * (self.n + 1)
        return mu + (mu % 2)

    @property
    def resolved_budget(self) -> int:
        return self.budget if self.budget is not None else 10 * self.n ** 3

    def cell_key(self) -> tuple:
        return (
            self.algorithm,
            self.objective.value,
            self.n,
            self.noise.kind,
            self.noise.delta,
            self.noise.p,
            self.noise.sigma,
            self.resolved_mu,
            self.pc,
            self.crossover,
            self.mutation_rate,
            self.resolved_budget,
        )

    def cell_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "objective": self.objective.value,
            "n": self.n,
            "mu": self.resolved_mu,
            "pc": self.pc,
            "crossover": self.crossover,
            "noise_kind": self.noise.kind,
            "delta": self.noise.delta if self.noise.kind == "bernoulli" else None,
            "p": self.noise.p if self.noise.kind == "bernoulli" else None,
            "sigma": self.noise.sigma if self.noise.kind == "gaussian" else None,
            "runs": self.runs,
            "budget": self.resolved_budget,
            "seed": self.seed,
        }


@dataclass
class RunRecord:
    run_index: int
    outcome: str                      # "covered" | "budget_exhausted"
    evaluations_used: int
    generations_used: int
    final_coverage_count: int
    max_population: int
    trace: Optional[list] = None      # [(generation, evaluations, coverage, pop size)]

    def to_dict(self) -> dict:
        d = {
            "run_index": self.run_index,
            "outcome": self.outcome,
            "evaluations_used": self.evaluations_used,
            "generations_used": self.generations_used,
            "final_coverage_count": self.final_coverage_count,
            "max_population": self.max_population,
        }
        if self.trace is not None:
            d["trace"] = [list(row) for row in self.trace]
        return d


@dataclass
class AggregateReport:
    config: ExperimentConfig
    success_rate: float
    mean_evals: float
    median_evals: float
    stddev_evals: float
    records: list = field(default_factory=list)

    @classmethod
    def from_records(cls, config: ExperimentConfig, records: Sequence[RunRecord]):
        evals = [r.evaluations_used for r in records]
        covered = sum(1 for r in records if r.outcome == "covered")
        stddev = statistics.stdev(evals) if len(evals) > 1 else 0.0
        return cls(
            config=config,
            success_rate=covered / len(records),
            mean_evals=statistics.fmean(evals),
            median_evals=float(statistics.median(evals)),
            stddev_evals=stddev,
            records=list(records),
        )

    def to_dict(self) -> dict:
        return {
            "cell": self.config.cell_dict(),
            "aggregate": {
                "success_rate": self.success_rate,
                "mean_evals": self.mean_evals,
                "median_evals": self.median_evals,
                "stddev_evals": self.stddev_evals,
            },
            "runs": [r.to_dict() for r in self.records],
        }


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary (str/int/float/None) parts."""
    canonical = "|".join(
        f"{type(p).__name__}:{p!r}" if p is not None else "none" for p in parts
    )
    digest = hashlib.sha256(canonical.encode()).digest()
    return int.from_bytes(digest[:8], "big")


def run_seed(config: ExperimentConfig, run_index: int) -> int:
    cell = derive_seed(config.seed, *config.cell_key())
    return derive_seed(cell, run_index)


def run_single(config: ExperimentConfig, run_index: int) -> RunRecord:
    """One independent run; deterministic given (config, run_index)."""
    rng = np.random.Generator(np.random.PCG64(run_seed(config, run_index)))
    budget = config.resolved_budget
    front_size = config.n + 1
    trace: Optional[list] = [] if config.trace else None

    if config.algorithm == "nsga2":
        alg = Nsga2Config(
            mu=config.resolved_mu,
            pc=config.pc,
            crossover=config.crossover,
            mutation_rate=config.mutation_rate,
        )
        state = nsga2_init(config.n, alg, config.objective, rng)
        coverage = front_coverage(state.true_f, config.n)
        max_pop = state.mu
        while coverage < front_size and state.evaluations <= budget:
            state, metrics = nsga2_generation(
                state, config.objective, config.noise, alg, rng
            )
            coverage = metrics.coverage
            if trace is not None:
                trace.append(
                    (state.generation, state.evaluations, coverage, state.mu)
                )
        evaluations = state.evaluations
        generations = state.generation
    else:
        alg = GsemoConfig(
            pc=config.pc, crossover=config.crossover, mutation_rate=config.mutation_rate
        )
        state = gsemo_init(config.n, config.objective, rng)
        result = run_gsemo(
            state,
            config.objective,
            config.noise,
            alg,
            rng,
            budget=budget,
            record_trace=config.trace,
        )
        coverage = result.coverage
        max_pop = result.max_population
        evaluations = result.evaluations
        generations = result.generations
        if trace is not None and result.trace_population is not None:
            trace.extend(
                zip(
                    range(1, result.generations + 1),
                    result.trace_evaluations.tolist(),
                    result.trace_coverage.tolist(),
                    result.trace_population.tolist(),
                )
            )

    covered = coverage == front_size
    return RunRecord(
        run_index=run_index,
        outcome="covered" if covered else "budget_exhausted",
        evaluations_used=int(evaluations),
        generations_used=int(generations),
        final_coverage_count=int(coverage),
        max_population=int(max_pop),
        trace=trace,
    )


def _run_cell(config: ExperimentConfig) -> AggregateReport:
    records = [run_single(config, i) for i in range(config.runs)]
    return AggregateReport.from_records(config, records)


def run_batch(config: ExperimentConfig, workers: int = 1) -> AggregateReport:
    """All runs of one cell; results identical for any worker count."""
    if workers <= 1 or config.runs == 1:
        return _run_cell(config)
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        records = list(pool.map(run_single, [config] * config.runs, range(config.runs)))
    return AggregateReport.from_records(config, records)


def sweep(configs: Sequence[ExperimentConfig], workers: int = 1) -> list[AggregateReport]:
    """Execute a list of cells; cell order in the output matches the input."""
    if not configs:
        raise ConfigError("sweep requires at least one cell")
    if workers <= 1:
        return [_run_cell(c) for c in configs]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_cell, configs))


def build_grid(
    algorithm: str,
    objectives: Sequence,
    ns: Sequence[int],
    noise_kind: str,
    ps: Sequence[float] = (),
    sigmas: Sequence[float] = (),
    delta: Optional[float] = None,
    **kwargs,
) -> list[ExperimentConfig]:
    """Cartesian product of objectives x ns x noise levels.

    For Bernoulli noise, delta defaults to n + 1 per cell. For Gaussian,
    `sigmas` are absolute standard deviations.
    """
    if not objectives:
        raise ConfigError("sweep requires a nonempty objective list")
    if not ns:
        raise ConfigError("sweep requires a nonempty n list")
    if noise_kind == "bernoulli" and not ps:
        raise ConfigError("Bernoulli sweep requires a nonempty p list")
    if noise_kind == "gaussian" and not sigmas:
        raise ConfigError("Gaussian sweep requires a nonempty sigma list")
    cells = []
    for obj in objectives:
        for n in ns:
            if noise_kind == "none":
                noises = [NoiseModel.none()]
            elif noise_kind == "bernoulli":
                d = delta if delta is not None else n + 1
                noises = [NoiseModel.bernoulli(d, p) for p in ps]
            else:
                noises = [NoiseModel.gaussian(s) for s in sigmas]
            for noise in noises:
                cells.append(
                    ExperimentConfig(
                        algorithm=algorithm, objective=obj, n=n, noise=noise, **kwargs
                    )
                )
    return cells


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def reports_to_csv(reports: Sequence[AggregateReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rep in reports:
        cell = rep.config.cell_dict()
        row = {
            **cell,
            "success_rate": rep.success_rate,
            "mean_evals": rep.mean_evals,
            "median_evals": rep.median_evals,
            "stddev_evals": rep.stddev_evals,
        }
        writer.writerow([_csv_value(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def reports_to_json(reports: Sequence[AggregateReport], base_config: dict = None) -> str:
    doc = {
        "config": base_config or {},
        "reports": [rep.to_dict() for rep in reports],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def emit_outputs(reports: Sequence[AggregateReport], fmt: str, path: str) -> None:
    """Write reports as CSV (tabular projection) or JSON (full records)."""
    if fmt == "csv":
        payload = reports_to_csv(reports)
    elif fmt == "json":
        payload = reports_to_json(reports)
    else:
        raise ConfigError(f"unknown output format: {fmt!r}")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(payload)
    except OSError as exc:
        raise OSError(f"cannot write output file {path!r}: {exc}") from exc
