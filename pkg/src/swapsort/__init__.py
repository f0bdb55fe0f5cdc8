"""Sorting by random bounded-range swaps with noisy comparisons:
simulation engine, exact chain analysis and experiment harness."""

from .chains import (
    ChainModel,
    StationaryResult,
    StationarySolveError,
    build_binary_chain,
    build_chain,
    closed_form_stationary,
    detailed_balance_violation,
    geometric_walk_expectation,
    kolmogorov_cycle_ratio,
    mixing_time,
    stationary,
    total_variation,
    weighted_drift,
)
from .experiments import (
    BoundCheck,
    CellResult,
    ConvergenceConfig,
    ConvergenceReport,
    RunStatistics,
    converged_phase_stats,
    detect_convergence,
    detect_many,
    estimated_convergence_time,
    sweep,
    verify_bounds,
)
from .permutations import (
    BinarySequence,
    Fitness,
    Permutation,
    fitness,
    inversions,
    max_dislocation,
    min_swaps_to_sort,
    random_permutation,
    sequence_inversions,
    threshold_inversion_sum,
    threshold_sequence,
    total_dislocation,
    weighted_inversions,
)
from .process import (
    ProcessParams,
    ProcessState,
    Trajectory,
    advance,
    binary_step,
    count_up_down,
    coupled_step,
    is_fitter,
    new_state,
    one_step_distribution,
    run,
    step,
    substream,
)

__version__ = "0.1.0"
