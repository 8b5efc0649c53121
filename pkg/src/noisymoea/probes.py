"""Empirical probes for the structural quantities behind the algorithms:
box/superior classification of populations, the positive-crowding bound,
the probability of mutating onto the LOTZ Pareto set, and GSEMO
shrinking-step statistics.

Statistical probes report 99% Wilson binomial confidence intervals and
use an absolute slack of 0.02 where a pass/fail verdict is attached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .objectives import evaluate_population

Z99 = 2.5758293035489004  # two-sided 99% normal quantile


@dataclass(frozen=True)
class CdClassification:
    """Counts of box points (both objectives in [C, C+D]), superior points
    (both objectives > C+D) and everything else."""

    C: int
    D: int
    cd_points: int
    superior_points: int
    other_points: int

    @property
    def separated(self) -> bool:
        return self.other_points == 0


def classify_cd(fitness, C: int, D: int) -> CdClassification:
    f = np.asarray(fitness, dtype=np.float64)
    if f.size == 0:
        return CdClassification(C, D, 0, 0, 0)
    if f.shape[1] != 2:
        raise ValueError("classification is defined for 2 objectives")
    in_box = ((f >= C) & (f <= C + D)).all(axis=1)
    superior = (f > C + D).all(axis=1)
    cd = int(in_box.sum())
    sup = int(superior.sum())
    return CdClassification(C, D, cd, sup, f.shape[0] - cd - sup)


@dataclass
class CrowdingBoundReport:
    bound: int
    max_positive_crowding: int
    layers_checked: int
    passed: bool


def check_crowding_bound(
    noisy_f: np.ndarray,
    ranks: np.ndarray,
    crowding: np.ndarray,
    C: int,
    D: int,
) -> CrowdingBoundReport:
    """For every layer consisting solely of box points of a separated
    population, count individuals with positive crowding distance and
    compare against 4(D+1)."""
    cls = classify_cd(noisy_f, C, D)
    if not cls.separated:
        raise ValueError(
            f"population is not ({C},{D})-separated: "
            f"{cls.other_points} points outside box and superior regions"
        )
    f = np.asarray(noisy_f, dtype=np.float64)
    in_box = ((f >= C) & (f <= C + D)).all(axis=1)
    bound = 4 * (D + 1)
    max_pos = 0
    layers = 0
    for r in np.unique(ranks):
        members = ranks == r
        if not in_box[members].all():
            continue
        layers += 1
        positive = int((crowding[members] > 0).sum())
        max_pos = max(max_pos, positive)
    return CrowdingBoundReport(
        bound=bound,
        max_positive_crowding=max_pos,
        layers_checked=layers,
        passed=max_pos <= bound,
    )


def wilson_interval(successes: int, trials: int, z: float = Z99) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = phat + z * z / (2 * trials)
    spread = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    return (centre - spread) / denom, (centre + spread) / denom


@dataclass
class MutationFrontEstimate:
    parent_class: str
    n: int
    trials: int
    hits: int
    estimate: float
    ci_low: float
    ci_high: float
    upper_bound: float

    @property
    def within_bound(self) -> bool:
        return self.ci_high <= self.upper_bound


def estimate_mutation_to_front(
    n: int,
    parent_class: str,
    trials: int,
    rng: np.random.Generator,
    rate: Optional[float] = None,
) -> MutationFrontEstimate:
    """Fraction of bitwise mutations landing on the LOTZ Pareto set
    {1^i 0^(n-i)}, with a 99% binomial confidence interval.

    parent_class 'onfront' samples parents uniformly from the Pareto
    set, 'offfront' uniformly from its complement (rejection sampling).
    The probe is only meaningful for n >= 3.
    """
    if parent_class not in ("onfront", "offfront"):
        raise ValueError(f"unknown parent class: {parent_class!r}")
    if trials < 10_000:
        raise ValueError("at least 10^4 trials required")
    if n < 3:
        raise ValueError("probe requires n >= 3")
    rate = rate if rate is not None else 1.0 / n
    hits = 0
    done = 0
    chunk = 100_000
    cols = np.arange(n)
    while done < trials:
        m = min(chunk, trials - done)
        if parent_class == "onfront":
            prefix = rng.integers(0, n + 1, size=m)
            parents = (cols[None, :] < prefix[:, None]).astype(np.uint8)
        else:
            parents = rng.integers(0, 2, size=(m, n), dtype=np.uint8)
            f = evaluate_population("lotz", parents)
            off = f[:, 0] + f[:, 1] != n
            parents = parents[off]
            if parents.shape[0] == 0:
                continue
            m = parents.shape[0]
            if done + m > trials:
                m = trials - done
                parents = parents[:m]
        flips = rng.random((m, n)) < rate
        children = parents ^ flips.astype(np.uint8)
        fc = evaluate_population("lotz", children)
        hits += int((fc[:, 0] + fc[:, 1] == n).sum())
        done += m
    lo, hi = wilson_interval(hits, trials)
    bound = 1 / math.e + 3 / n if parent_class == "onfront" else 3 / n
    return MutationFrontEstimate(
        parent_class=parent_class,
        n=n,
        trials=trials,
        hits=hits,
        estimate=hits / trials,
        ci_low=lo,
        ci_high=hi,
        upper_bound=bound,
    )


@dataclass
class ShrinkingStepReport:
    p: float
    alpha: int
    threshold: int
    qualifying_steps: int
    shrinking_steps: int
    frequency: float
    ci_low: float
    ci_high: float
    required: float
    conclusive: bool
    passed: Optional[bool]
    note: str = ""


def shrinking_step_stats(
    population_sizes: Sequence[int], p: float, alpha: int
) -> ShrinkingStepReport:
    """Frequency of GSEMO steps that end at or below the shrink threshold
    ceil(p*alpha)+1, among steps starting strictly above it.

    Degenerate noise probabilities (p = 0 or 1) yield a descriptive,
    vacuous report. Fewer than 10^3 qualifying steps is reported as
    inconclusive rather than a failure.
    """
    sizes = np.asarray(population_sizes, dtype=np.int64)
    threshold = math.ceil(p * alpha) + 1
    before = sizes[:-1]
    after = sizes[1:]
    qualifying = before >= threshold
    nq = int(qualifying.sum())
    shrinks = int((after[qualifying] <= threshold).sum())
    freq = shrinks / nq if nq else 0.0
    lo, hi = wilson_interval(shrinks, nq)
    required = p / 2 - 0.02
    note = ""
    if p in (0.0, 1.0):
        note = "degenerate noise probability; report is descriptive only"
        return ShrinkingStepReport(
            p, alpha, threshold, nq, shrinks, freq, lo, hi, required, False, None, note
        )
    if nq < 1000:
        note = f"only {nq} qualifying steps; inconclusive"
        return ShrinkingStepReport(
            p, alpha, threshold, nq, shrinks, freq, lo, hi, required, False, None, note
        )
    return ShrinkingStepReport(
        p, alpha, threshold, nq, shrinks, freq, lo, hi, required, True, lo >= required
    )


def max_population_probe(population_sizes: Sequence[int]) -> int:
    """Largest archive size observed along a GSEMO trace."""
    sizes = np.asarray(population_sizes, dtype=np.int64)
    return int(sizes.max()) if sizes.size else 0


@dataclass
class CrowdingBoundProbeReport:
    n: int
    noise_p: float
    generations_sampled: int
    bound: int
    max_positive_crowding: int
    violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0


def crowding_bound_probe(
    n: int,
    noise_p: float,
    generations: int,
    seed: int = 0,
    objective: str = "lotz",
    mu: Optional[int] = None,
) -> CrowdingBoundProbeReport:
    """Sample live noisy NSGA-II generations (Bernoulli delta = n+1, so
    every population is (0, n)-separated by construction) and check the
    positive-crowding bound 4(n+1) on each one."""
    from .noise import NoiseModel
    from .nsga2 import Nsga2Config, nsga2_generation, nsga2_init
    from .objectives import ObjectiveId

    objective = ObjectiveId.parse(objective)
    if mu is None:
        mu = 9 * (n + 1)
        mu += mu % 2  # default population size rounded up to the next even value
    config = Nsga2Config(mu=mu)
    model = NoiseModel.bernoulli(n + 1, noise_p)
    bound = 4 * (n + 1)
    sampled = 0
    max_pos = 0
    violations = 0
    restart = 0
    while sampled < generations:
        rng = np.random.Generator(np.random.PCG64([seed, restart]))
        state = nsga2_init(n, config, objective, rng)
        # bounded run length so covered runs hand over to a fresh one
        for _ in range(max(1, generations // 4)):
            if sampled >= generations:
                break
            state, metrics = nsga2_generation(
                state, objective, model, config, rng, keep_r_stats=True
            )
            report = check_crowding_bound(
                metrics.r_noisy, metrics.r_ranks, metrics.r_crowding, 0, n
            )
            sampled += 1
            max_pos = max(max_pos, report.max_positive_crowding)
            if not report.passed:
                violations += 1
        restart += 1
    return CrowdingBoundProbeReport(
        n=n,
        noise_p=noise_p,
        generations_sampled=sampled,
        bound=bound,
        max_positive_crowding=max_pos,
        violations=violations,
    )


def shrinking_probe(
    n: int,
    p: float,
    seed: int = 0,
    objective: str = "omm",
    min_qualifying: int = 10_000,
    max_generations: int = 20_000_000,
) -> ShrinkingStepReport:
    """Collect GSEMO archive-size traces under Bernoulli(n+1, p) until
    enough qualifying steps are observed, then report shrink statistics
    with alpha = n + 1 (the Pareto front size)."""
    from .gsemo import GsemoConfig, gsemo_init, run_gsemo
    from .noise import NoiseModel
    from .objectives import ObjectiveId

    objective = ObjectiveId.parse(objective)
    model = NoiseModel.bernoulli(n + 1, p)
    config = GsemoConfig()
    alpha = n + 1
    threshold = math.ceil(p * alpha) + 1
    rng = np.random.Generator(np.random.PCG64([seed]))
    state = gsemo_init(n, objective, rng)
    sizes = [state.size]
    chunk = 200_000
    done = 0
    while done < max_generations:
        result = run_gsemo(
            state, objective, model, config, rng,
            max_gens=min(chunk, max_generations - done),
            record_trace=True,
        )
        if result.generations == 0:
            break
        sizes.extend(result.trace_population.tolist())
        done += result.generations
        arr = np.asarray(sizes[:-1])
        if int((arr >= threshold).sum()) >= min_qualifying:
            break
    return shrinking_step_stats(sizes, p, alpha)
