"""Non-adaptive sublinear-query testers and estimators for matrix
intrinsic dimensionality: rank over arbitrary fields, stable rank,
Schatten-p norms, operator norm, and spectral entropy."""

from .errors import (
    AlreadyRead,
    BudgetExceeded,
    ConvergenceFailure,
    EmptyPool,
    IndexOutOfRange,
    InsufficientSketch,
    MaskNotStaircase,
    MatprobeError,
    NonAdaptivityViolation,
    NotFullRankBase,
    OutOfRange,
    ShapeMismatch,
    TooLarge,
    ZeroInverse,
    ZeroMatrix,
)
from .estimators import (
    EstimatorReport,
    SamplerParams,
    estimate_frobenius,
    estimate_opnorm_cycles,
    estimate_opnorm_sampling,
    estimate_opnorm_sensing,
    opnorm_screen,
)
from .fields import DenseMatrix, PrimeField, field_inverse, is_prime
from .harness import ExperimentConfig, TrialRecord, run_experiment, write_csv
from .instances import (
    InstanceSpec,
    distance_to_rank,
    gen_gaussian_pair,
    gen_low_rank_field,
    gen_planted,
    gen_random_orthogonal,
    gen_rank_one_signed,
    gen_schatten_pair,
    gen_signed_uniform,
    gen_stable_rank_pair,
    gen_uniform_field,
    materialize,
)
from .linalg import (
    SpectralSummary,
    jacobi_singular_values,
    matrix_entropy,
    rank_exact,
    schatten_norm,
    singular_values,
    stable_rank,
)
from .matio import load_matrix, save_matrix
from .oracles import EntryOracle, SensingOracle
from .rank_test import (
    PartialMatrix,
    RankTestConfig,
    SamplingPattern,
    Verdict,
    augment_set,
    build_pattern,
    has_augment_pattern,
    min_completion_rank,
    solve_eta,
    test_rank,
    test_rank_sensing,
)
from .spectral_tests import (
    SchattenConfig,
    StableRankConfig,
    test_schatten,
    test_stable_rank,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
