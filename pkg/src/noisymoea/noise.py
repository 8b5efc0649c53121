"""Posterior noise models and the per-generation noisy-evaluation cache.

All models add one scalar offset to every objective of an evaluation:

* ``none``      -- offset 0.
* ``bernoulli`` -- offset delta with probability p, else 0.
* ``gaussian``  -- offset drawn once from Normal(0, sigma^2).

Each fresh draw counts as one fitness evaluation. Within a generation
the first draw for an individual is cached and returned on repeated
queries; entering the next generation invalidates the cache, so every
individual (including surviving parents) is re-drawn.

RNG contract: one seeded ``numpy.random.Generator`` per run; noise,
variation and selection consume from the same stream in the fixed order
documented in :mod:`noisymoea.nsga2` and :mod:`noisymoea.gsemo`.
Gaussian offsets use ``Generator.normal`` (ziggurat transform of
uniform draws), Bernoulli decisions compare ``Generator.random`` to p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Optional

import numpy as np

from .core import ConfigError

KIND_NONE = 0
KIND_BERNOULLI = 1
KIND_GAUSSIAN = 2

_KIND_CODES = {"none": KIND_NONE, "bernoulli": KIND_BERNOULLI, "gaussian": KIND_GAUSSIAN}


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "none"
    delta: float = 0.0
    p: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in _KIND_CODES:
            raise ConfigError(f"unknown noise kind: {self.kind!r}")
        if self.kind == "bernoulli" and not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"Bernoulli noise probability must be in [0,1], got {self.p}")
        if self.kind == "gaussian" and self.sigma < 0:
            raise ConfigError(f"Gaussian sigma must be >= 0, got {self.sigma}")

    @classmethod
    def none(cls) -> "NoiseModel":
        return cls(kind="none")

    @classmethod
    def bernoulli(cls, delta: float, p: float) -> "NoiseModel":
        return cls(kind="bernoulli", delta=delta, p=p)

    @classmethod
    def gaussian(cls, sigma: float) -> "NoiseModel":
        return cls(kind="gaussian", sigma=sigma)

    @property
    def kind_code(self) -> int:
        return _KIND_CODES[self.kind]

    @property
    def integer_valued(self) -> bool:
        """True if noisy fitness stays integral (None, or Bernoulli with integer delta)."""
        if self.kind == "gaussian":
            return False
        return self.kind == "none" or float(self.delta).is_integer()


@dataclass(frozen=True)
class NoisyEvaluation:
    true_fitness: tuple
    noisy_fitness: tuple
    was_noisy: bool
    generation_stamp: int


def draw_noisy_fitness(
    model: NoiseModel,
    true_fitness,
    rng: np.random.Generator,
    generation: int = 0,
) -> NoisyEvaluation:
    """One fresh noisy evaluation: a single random decision or scalar draw,
    with the same offset applied to every objective."""
    true_fitness = tuple(true_fitness)
    if model.kind == "bernoulli":
        was_noisy = bool(rng.random() < model.p)
        offset = model.delta if was_noisy else 0
        if model.integer_valued:
            offset = int(offset)
        noisy = tuple(v + offset for v in true_fitness)
        return NoisyEvaluation(true_fitness, noisy, was_noisy, generation)
    if model.kind == "gaussian":
        offset = float(rng.normal(0.0, model.sigma))
        noisy = tuple(v + offset for v in true_fitness)
        return NoisyEvaluation(true_fitness, noisy, False, generation)
    return NoisyEvaluation(true_fitness, true_fitness, False, generation)


def draw_offsets(
    model: NoiseModel, count: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Batch of per-individual offsets: (offsets, noisy_flags).

    One batch call consumes exactly `count` random decisions (Bernoulli)
    or scalar draws (Gaussian) in individual order; `none` consumes
    nothing. Offsets are int64 for integer-preserving models, float64
    otherwise.
    """
    if model.kind == "bernoulli":
        flags = rng.random(count) < model.p
        dtype = np.int64 if model.integer_valued else np.float64
        offsets = np.where(flags, model.delta, 0).astype(dtype)
        return offsets, flags
    if model.kind == "gaussian":
        offsets = rng.normal(0.0, model.sigma, count)
        return offsets, np.zeros(count, dtype=bool)
    dtype = np.int64
    return np.zeros(count, dtype=dtype), np.zeros(count, dtype=bool)


class NoiseCache:
    """Per-run store of noisy evaluations with generation invalidation.

    A cache instance belongs to exactly one run. Fresh draws (not cached
    queries) are counted in ``evaluations``.
    """

    def __init__(self, model: NoiseModel, rng: np.random.Generator):
        self.model = model
        self.rng = rng
        self.generation: Optional[int] = None
        self.evaluations = 0
        self._store: dict[Hashable, NoisyEvaluation] = {}

    def begin_generation(self, generation: int) -> None:
        if self.generation is not None and generation <= self.generation:
            raise ValueError(
                f"generation must strictly increase: {generation} after {self.generation}"
            )
        self.generation = generation
        self._store.clear()

    def evaluate(self, key: Hashable, true_fitness) -> NoisyEvaluation:
        if self.generation is None:
            raise ValueError("begin_generation must be called before evaluate")
        hit = self._store.get(key)
        if hit is not None:
            return hit
        ev = draw_noisy_fitness(self.model, true_fitness, self.rng, self.generation)
        self._store[key] = ev
        self.evaluations += 1
        return ev
