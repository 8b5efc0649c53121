"""Benchmark objectives: LOTZ (LeadingOnesTrailingZeroes) and OneMinMax.

Genotypes are numpy uint8 arrays; index 0 is the first bit of the
string. Both objectives are bi-objective, maximising, with values in
[0, n].
"""

from __future__ import annotations

import enum

import numpy as np

from .core import ConfigError, ObjectiveMeta


class ObjectiveId(enum.Enum):
    LOTZ = "lotz"
    OMM = "omm"

    @classmethod
    def parse(cls, value) -> "ObjectiveId":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigError(f"unknown objective: {value!r}") from None


def as_genotype(x) -> np.ndarray:
    bits = np.asarray(x, dtype=np.uint8)
    if bits.ndim != 1 or bits.size < 1:
        raise ValueError("genotype must be a nonempty 1-D bit array")
    return bits


def leading_ones(x) -> int:
    """Length of the longest all-ones prefix."""
    bits = as_genotype(x)
    zeros = np.flatnonzero(bits == 0)
    return int(zeros[0]) if zeros.size else bits.size


def trailing_zeros(x) -> int:
    """Length of the longest all-zeros suffix."""
    bits = as_genotype(x)
    ones = np.flatnonzero(bits == 1)
    return bits.size - 1 - int(ones[-1]) if ones.size else bits.size


def evaluate_true(objective, x) -> tuple:
    """True (noise-free) fitness of a single genotype."""
    objective = ObjectiveId.parse(objective)
    bits = as_genotype(x)
    if objective is ObjectiveId.LOTZ:
        return (leading_ones(bits), trailing_zeros(bits))
    ones = int(bits.sum())
    return (ones, bits.size - ones)


def evaluate_population(objective, genos: np.ndarray) -> np.ndarray:
    """True fitness of a (N, n) genotype matrix as an (N, 2) int64 array."""
    objective = ObjectiveId.parse(objective)
    genos = np.asarray(genos, dtype=np.uint8)
    n = genos.shape[1]
    out = np.empty((genos.shape[0], 2), dtype=np.int64)
    if objective is ObjectiveId.LOTZ:
        # Prefix of ones survives a running product; same on the reversed
        # complement for trailing zeros.
        out[:, 0] = np.cumprod(genos, axis=1).sum(axis=1)
        out[:, 1] = np.cumprod(1 - genos[:, ::-1], axis=1).sum(axis=1)
    else:
        ones = genos.sum(axis=1)
        out[:, 0] = ones
        out[:, 1] = n - ones
    return out


def objective_meta(objective, n: int) -> ObjectiveMeta:
    objective = ObjectiveId.parse(objective)
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    # Both shipped objectives span [0, n] and have front size n + 1.
    return ObjectiveMeta(
        name=objective.value, n=n, f_min=0, f_max=n, pareto_front_size=n + 1
    )
