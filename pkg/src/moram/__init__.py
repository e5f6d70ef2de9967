"""Exact sparse signal recovery from compressed two-period modulo
measurements: alternating bin-index estimation and outlier-robust L1
recovery, plus the Monte Carlo and wavelet-image experiment harness."""

from .altmin import DescentConfig, DescentStep, DescentTrace, moram_descent, update_bin_indices
from .core import (
    BinIndexVector,
    CorrectionVector,
    MeasurementEnsemble,
    ModuloObservation,
    SparseSignal,
    gaussian_matrix,
    hard_threshold,
    random_sparse_signal,
    relative_error,
)
from .harness import (
    ExperimentRecord,
    ImageRunResult,
    SweepAggregate,
    SweepConfig,
    derive_seed,
    run_image,
    run_sweep,
    run_trial,
)
from .initialize import (
    correct_measurements,
    initial_estimate,
    ml_bin_indices,
    moram_initialize,
)
from .model import (
    DynamicRangeViolation,
    forward,
    mod_two_period,
    signum,
    true_bin_indices,
)
from .solvers import (
    CosampResult,
    JusticePursuitResult,
    L1SolverConfig,
    L1Solution,
    RankDeficientError,
    basis_pursuit,
    cosamp,
    justice_pursuit,
)
from .theory import (
    BeseBudget,
    angular_distance,
    empirical_bese,
    hamming_distance,
    random_sparse_unit_pair,
    required_measurements,
    sandwich_check,
)
from .wavelet import haar2_forward, haar2_inverse, psnr, read_pgm, sparsify, write_pgm

__version__ = "0.1.0"

__all__ = [
    "BeseBudget",
    "BinIndexVector",
    "CorrectionVector",
    "CosampResult",
    "DescentConfig",
    "DescentStep",
    "DescentTrace",
    "DynamicRangeViolation",
    "ExperimentRecord",
    "ImageRunResult",
    "JusticePursuitResult",
    "L1SolverConfig",
    "L1Solution",
    "MeasurementEnsemble",
    "ModuloObservation",
    "RankDeficientError",
    "SparseSignal",
    "SweepAggregate",
    "SweepConfig",
    "angular_distance",
    "basis_pursuit",
    "correct_measurements",
    "cosamp",
    "derive_seed",
    "empirical_bese",
    "forward",
    "gaussian_matrix",
    "haar2_forward",
    "haar2_inverse",
    "hamming_distance",
    "hard_threshold",
    "initial_estimate",
    "justice_pursuit",
    "ml_bin_indices",
    "mod_two_period",
    "moram_descent",
    "moram_initialize",
    "psnr",
    "random_sparse_signal",
    "random_sparse_unit_pair",
    "read_pgm",
    "relative_error",
    "required_measurements",
    "run_image",
    "run_sweep",
    "run_trial",
    "sandwich_check",
    "signum",
    "sparsify",
    "true_bin_indices",
    "update_bin_indices",
    "write_pgm",
]
