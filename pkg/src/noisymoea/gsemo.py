"""GSEMO: steady-state archive of mutually non-dominated (noisy) individuals.

Each generation re-draws noisy fitness for the whole archive, creates a
single offspring by (optional) crossover plus bitwise mutation, and adds
it unless some member dominates it, removing all members it weakly
dominates. Survival comparisons use noisy fitness of the current
generation; coverage is measured on true fitness.

The run loop is numba-compiled; it consumes the run's seeded
``numpy.random.Generator`` directly, so single-generation stepping and
whole-run execution share one code path and one stream.

RNG consumption order within one generation (fixed):
  1. per-member parent noise draws, archive order
  2. parent index
  3. crossover decision u; if u < pc: partner index, then cut point
     (one-point, n >= 2) or n per-bit coins (uniform)
  4. n per-bit mutation coins
  5. offspring noise draw
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .core import ConfigError
from .noise import NoiseModel
from .objectives import ObjectiveId, evaluate_population

_BIG_BUDGET = 2 ** 62

# status codes returned by the kernel
_OK = 0
_NEED_CAPACITY = 1


@dataclass
class GsemoConfig:
    pc: float = 0.9
    crossover: str = "onepoint"
    mutation_rate: Optional[float] = None  # None -> 1/n

    def validate(self) -> None:
        if not 0.0 <= self.pc <= 1.0:
            raise ConfigError(f"pc must be in [0,1], got {self.pc}")
        if self.crossover not in ("onepoint", "uniform"):
            raise ConfigError(f"unknown crossover kind: {self.crossover!r}")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ConfigError(f"mutation rate must be in [0,1], got {self.mutation_rate}")


@dataclass
class GsemoState:
    genos: np.ndarray        # (capacity, n) uint8; rows [0:size) are live
    true_f: np.ndarray       # (capacity, 2) int64
    size: int
    generation: int = 0
    evaluations: int = 0

    @property
    def n(self) -> int:
        return self.genos.shape[1]

    @property
    def population(self) -> np.ndarray:
        return self.genos[: self.size]

    @property
    def population_true_f(self) -> np.ndarray:
        return self.true_f[: self.size]


@dataclass
class GsemoRunResult:
    generations: int
    evaluations: int
    covered: bool
    coverage: int
    max_population: int
    trace_coverage: Optional[np.ndarray] = None
    trace_population: Optional[np.ndarray] = None
    trace_evaluations: Optional[np.ndarray] = None


def gsemo_init(
    n: int, objective: ObjectiveId, rng: np.random.Generator, capacity: int = 0
) -> GsemoState:
    """Archive of exactly one uniform random genotype (one evaluation)."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    capacity = max(capacity, 2 * n + 4, 16)
    genos = np.zeros((capacity, n), dtype=np.uint8)
    true_f = np.zeros((capacity, 2), dtype=np.int64)
    genos[0] = rng.integers(0, 2, size=n, dtype=np.uint8)
    true_f[0] = evaluate_population(objective, genos[:1])[0]
    return GsemoState(genos=genos, true_f=true_f, size=1, generation=0, evaluations=1)


@njit(cache=True)
def _gsemo_kernel(
    rng,
    genos,
    true_f,
    size,
    generation,
    evaluations,
    obj_code,
    noise_kind,
    delta,
    p,
    sigma,
    pc,
    cross_code,
    rate,
    budget,
    max_gens,
    front_size,
    trace_cov,
    trace_pop,
    trace_evals,
    record,
):
    cap, n = genos.shape
    noisy = np.empty((cap, 2), dtype=np.float64)
    child = np.empty(n, dtype=np.uint8)
    covered_buf = np.zeros(n + 1, dtype=np.bool_)

    # coverage of the incoming archive
    cov = 0
    for i in range(size):
        if true_f[i, 0] + true_f[i, 1] == n and not covered_buf[true_f[i, 0]]:
            covered_buf[true_f[i, 0]] = True
            cov += 1
    max_pop = size
    gens_done = 0
    status = _OK

    while gens_done < max_gens:
        if cov == front_size or evaluations > budget:
            break
        if size + 1 > cap:
            status = _NEED_CAPACITY
            break
        generation += 1

        # 1. re-draw archive noise
        for i in range(size):
            off = 0.0
            if noise_kind == 1:
                if rng.random() < p:
                    off = delta
            elif noise_kind == 2:
                off = rng.normal(0.0, sigma)
            noisy[i, 0] = true_f[i, 0] + off
            noisy[i, 1] = true_f[i, 1] + off

        # 2-3. parent selection and crossover
        i1 = rng.integers(0, size)
        for j in range(n):
            child[j] = genos[i1, j]
        if rng.random() < pc:
            i2 = rng.integers(0, size)
            if cross_code == 0:
                if n >= 2:
                    c = rng.integers(1, n)
                    for j in range(c, n):
                        child[j] = genos[i2, j]
            else:
                for j in range(n):
                    if rng.random() < 0.5:
                        child[j] = genos[i2, j]

        # 4. bitwise mutation
        for j in range(n):
            if rng.random() < rate:
                child[j] = 1 - child[j]

        # 5. evaluate child
        if obj_code == 0:
            f1 = 0
            while f1 < n and child[f1] == 1:
                f1 += 1
            f2 = 0
            while f2 < n and child[n - 1 - f2] == 0:
                f2 += 1
        else:
            ones = 0
            for j in range(n):
                ones += child[j]
            f1 = ones
            f2 = n - ones
        off = 0.0
        if noise_kind == 1:
            if rng.random() < p:
                off = delta
        elif noise_kind == 2:
            off = rng.normal(0.0, sigma)
        c0 = f1 + off
        c1 = f2 + off

        evaluations += 1 + size

        dominated = False
        for i in range(size):
            if noisy[i, 0] >= c0 and noisy[i, 1] >= c1 and (
                noisy[i, 0] > c0 or noisy[i, 1] > c1
            ):
                dominated = True
                break
        if not dominated:
            w = 0
            for i in range(size):
                if not (c0 >= noisy[i, 0] and c1 >= noisy[i, 1]):
                    if w != i:
                        for j in range(n):
                            genos[w, j] = genos[i, j]
                        true_f[w, 0] = true_f[i, 0]
                        true_f[w, 1] = true_f[i, 1]
                    w += 1
            for j in range(n):
                genos[w, j] = child[j]
            true_f[w, 0] = f1
            true_f[w, 1] = f2
            size = w + 1

        if size > max_pop:
            max_pop = size

        cov = 0
        for i in range(n + 1):
            covered_buf[i] = False
        for i in range(size):
            if true_f[i, 0] + true_f[i, 1] == n and not covered_buf[true_f[i, 0]]:
                covered_buf[true_f[i, 0]] = True
                cov += 1

        if record:
            trace_cov[gens_done] = cov
            trace_pop[gens_done] = size
            trace_evals[gens_done] = evaluations
        gens_done += 1

    return size, generation, evaluations, gens_done, cov, max_pop, status


def run_gsemo(
    state: GsemoState,
    objective: ObjectiveId,
    noise_model: NoiseModel,
    config: GsemoConfig,
    rng: np.random.Generator,
    budget: int = _BIG_BUDGET,
    max_gens: int = _BIG_BUDGET,
    record_trace: bool = False,
) -> GsemoRunResult:
    """Advance a GSEMO state until coverage, budget exhaustion, or max_gens.

    The archive grows without bound in principle; the backing arrays are
    enlarged transparently whenever the kernel runs out of capacity.
    """
    config.validate()
    objective = ObjectiveId.parse(objective)
    n = state.n
    rate = config.mutation_rate if config.mutation_rate is not None else 1.0 / n
    front_size = n + 1
    obj_code = 0 if objective is ObjectiveId.LOTZ else 1
    cross_code = 0 if config.crossover == "onepoint" else 1

    traces_cov: list[np.ndarray] = []
    traces_pop: list[np.ndarray] = []
    traces_evals: list[np.ndarray] = []
    max_pop = state.size
    gens_total = 0
    while True:
        remaining = max_gens - gens_total
        # every generation costs >= 2 evaluations once the archive exists
        by_budget = max(0, (budget - state.evaluations) // 2 + 2)
        chunk = int(min(remaining, by_budget, 2 ** 22))
        if record_trace:
            t_cov = np.zeros(chunk, dtype=np.int32)
            t_pop = np.zeros(chunk, dtype=np.int32)
            t_evals = np.zeros(chunk, dtype=np.int64)
        else:
            t_cov = np.zeros(1, dtype=np.int32)
            t_pop = np.zeros(1, dtype=np.int32)
            t_evals = np.zeros(1, dtype=np.int64)
        size, generation, evaluations, gens_done, cov, mp, status = _gsemo_kernel(
            rng,
            state.genos,
            state.true_f,
            state.size,
            state.generation,
            state.evaluations,
            obj_code,
            noise_model.kind_code,
            float(noise_model.delta),
            float(noise_model.p),
            float(noise_model.sigma),
            float(config.pc),
            cross_code,
            float(rate),
            budget,
            chunk,
            front_size,
            t_cov,
            t_pop,
            t_evals,
            record_trace,
        )
        state.size = size
        state.generation = generation
        state.evaluations = evaluations
        max_pop = max(max_pop, mp)
        gens_total += gens_done
        if record_trace and gens_done:
            traces_cov.append(t_cov[:gens_done])
            traces_pop.append(t_pop[:gens_done])
            traces_evals.append(t_evals[:gens_done])
        if status == _NEED_CAPACITY:
            cap = state.genos.shape[0]
            genos = np.zeros((2 * cap, n), dtype=np.uint8)
            true_f = np.zeros((2 * cap, 2), dtype=np.int64)
            genos[:cap] = state.genos
            true_f[:cap] = state.true_f
            state.genos = genos
            state.true_f = true_f
            continue
        if (
            gens_done == chunk
            and gens_total < max_gens
            and cov < front_size
            and state.evaluations <= budget
        ):
            continue
        break

    return GsemoRunResult(
        generations=gens_total,
        evaluations=state.evaluations,
        covered=cov == front_size,
        coverage=int(cov),
        max_population=int(max_pop),
        trace_coverage=np.concatenate(traces_cov) if traces_cov else None,
        trace_population=np.concatenate(traces_pop) if traces_pop else None,
        trace_evaluations=np.concatenate(traces_evals) if traces_evals else None,
    )


def gsemo_generation(
    state: GsemoState,
    objective: ObjectiveId,
    noise_model: NoiseModel,
    config: GsemoConfig,
    rng: np.random.Generator,
) -> GsemoRunResult:
    """Exactly one GSEMO generation (in place); 1 + |P_t| evaluations."""
    return run_gsemo(
        state, objective, noise_model, config, rng, max_gens=1, record_trace=True
    )
