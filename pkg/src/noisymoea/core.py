"""Fitness vectors, dominance relations, and the exact Pareto oracle.

Fitness vectors are plain tuples of objective values (ints for true
fitness, floats allowed for Gaussian-noised fitness). All comparisons
are maximising.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

FitnessVector = tuple


class ConfigError(ValueError):
    """Invalid configuration (unknown objective, bad parameter, ...)."""


@dataclass(frozen=True)
class ObjectiveMeta:
    """Closed-form summary of one benchmark objective at a given size."""

    name: str
    n: int
    f_min: int
    f_max: int
    pareto_front_size: int

    def __post_init__(self):
        if self.f_min > self.f_max:
            raise ValueError("f_min must not exceed f_max")
        if self.pareto_front_size < 1:
            raise ValueError("pareto_front_size must be >= 1")


def _check_dims(a: Sequence, b: Sequence) -> None:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")


def weakly_dominates(a: Sequence, b: Sequence) -> bool:
    """True iff a_i >= b_i in every objective."""
    _check_dims(a, b)
    return all(x >= y for x, y in zip(a, b))


def dominates(a: Sequence, b: Sequence) -> bool:
    """True iff a weakly dominates b and differs in at least one objective."""
    _check_dims(a, b)
    return weakly_dominates(a, b) and tuple(a) != tuple(b)


def non_dominated_set(vectors: Iterable[Sequence]) -> set:
    """The subset of vectors not dominated by any other vector."""
    vs = {tuple(v) for v in vectors}
    return {v for v in vs if not any(dominates(u, v) for u in vs)}


def pareto_front_oracle(objective, n: int) -> set:
    """Exact Pareto front of the true (noise-free) objective.

    Closed form for the shipped benchmarks: both LOTZ and OneMinMax have
    front {(i, n - i) : 0 <= i <= n}. Cross-checked against brute-force
    enumeration in the test suite.
    """
    from .objectives import ObjectiveId

    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    objective = ObjectiveId.parse(objective)
    # Same closed form for LOTZ and OMM.
    return {(i, n - i) for i in range(n + 1)}


def brute_force_pareto_front(objective, n: int) -> set:
    """Pareto front by enumeration of all 2^n bit strings (n <= 20)."""
    from .objectives import ObjectiveId, evaluate_true

    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    if n > 20:
        raise ValueError(f"enumeration limited to n <= 20, got {n}")
    objective = ObjectiveId.parse(objective)
    vectors = []
    for g in range(2 ** n):
        bits = np.array([(g >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)
        vectors.append(evaluate_true(objective, bits))
    return non_dominated_set(vectors)


def coverage_count(population_true_fitness: Iterable[Sequence], front: set) -> int:
    """Number of front vectors present in the population's TRUE fitness.

    The front is covered iff the count equals len(front). Coverage is
    always measured on true fitness, never on noisy fitness.
    """
    seen = {tuple(v) for v in population_true_fitness}
    return sum(1 for v in front if tuple(v) in seen)
