"""Noisy evolutionary multiobjective optimisation lab: NSGA-II and GSEMO
on LOTZ / OneMinMax under posterior noise, with exact Pareto oracles,
statistical probes of the selection and mutation structure, and a reproducible experiment harness."""

from .core import (
    ConfigError,
    ObjectiveMeta,
    brute_force_pareto_front,
    coverage_count,
    dominates,
    non_dominated_set,
    pareto_front_oracle,
    weakly_dominates,
)
from .experiments import (
    AggregateReport,
    ExperimentConfig,
    RunRecord,
    build_grid,
    run_batch,
    run_single,
    sweep,
)
from .gsemo import GsemoConfig, GsemoState, gsemo_generation, gsemo_init, run_gsemo
from .noise import NoiseCache, NoiseModel, NoisyEvaluation, draw_noisy_fitness
from .nsga2 import (
    Nsga2Config,
    Nsga2State,
    bitwise_mutation,
    crowding_distances,
    non_dominated_sort,
    nsga2_generation,
    nsga2_init,
    one_point_crossover,
    survival_select,
    uniform_crossover,
)
from .probes import (
    CdClassification,
    CrowdingBoundReport,
    MutationFrontEstimate,
    ShrinkingStepReport,
    check_crowding_bound,
    classify_cd,
    estimate_mutation_to_front,
    crowding_bound_probe,
    shrinking_probe,
    shrinking_step_stats,
    wilson_interval,
)
from .objectives import (
    ObjectiveId,
    evaluate_population,
    evaluate_true,
    leading_ones,
    objective_meta,
    trailing_zeros,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
