"""Simulation laboratory for a fitness-marked birth-death chain.

The package simulates a population where births arrive with probability p,
each newborn carries an independent uniform fitness mark, and deaths always
remove the least-fit living species.  It provides exact full and reduced
simulators driven by one counter-based stream, the excursion decomposition of
the below-threshold population process, closed-form reference laws, and a
Monte Carlo harness that statistically verifies the model's limit behaviour.
"""

from .analytic import (
    GeometricLaw,
    HalfNormalLaw,
    StableHalfLaw,
    StationaryLawL,
    correction_moments,
    critical_fitness,
    expected_mu,
    half_normal_cdf,
    half_normal_mean,
    lil_envelope,
    lil_phi,
    stable_cdf,
    stable_laplace,
    stable_pdf,
    stationary_law_L,
)
from .excursions import (
    ExcursionAggregates,
    ExcursionBatch,
    ExcursionRecord,
    SrwExcursionOracle,
    aggregate_excursions,
    ladder_times,
    occupation_vs_excursions,
    sample_excursion,
    sample_excursions,
    sample_mu,
    sample_srw_return_times,
    stable_scaling_sample,
)
from .model import (
    ModelParams,
    StepOutcome,
    TrajectorySeries,
    TrajectoryState,
    run_trajectory,
    step_full,
    step_reduced,
    surviving_fitness_above,
)
from .montecarlo import (
    ExperimentResult,
    ExperimentSpec,
    RunManifest,
    acceptance_plan,
    run_experiment,
    sweep,
)
from .rng import PrimitiveStream, derive_seed, derive_seeds, mix64, uniform_at
from .stats import (
    EmpiricalSample,
    TestReport,
    chi_square_goodness,
    ks_pvalue,
    ks_statistic,
    lil_tracker,
    mean_with_ci,
    merge_tail_bins,
    two_sample_ks,
)

__version__ = "0.1.0"
