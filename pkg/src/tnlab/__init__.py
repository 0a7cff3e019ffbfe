"""Injective, symmetric injective and positive injective tensor norms on finite l_p lattices."""
from .kernels import BACKEND
from .lattice import (
    INF,
    DualPoint,
    SequenceSpace,
    Vector,
    conjugate_exponent,
    holder_check,
    holder_mean_functional,
    linear_max_over_ball,
    norm,
)
from .norms import (
    IncompatibleMethodError,
    NormConfig,
    NormEstimate,
    compute_norm,
    injective_norm,
    positive_injective_norm,
    positive_sym_injective_norm,
    regular_modulus_oracle,
    sym_injective_norm,
)
from .tensor import (
    FullTensor,
    RankOneSum,
    SymmetricTensor,
    coefficient_sign_flip,
    diagonal_project,
    diagonal_symmetric,
    diagonal_tensor,
    evaluate_multilinear,
    evaluate_polynomial,
    modulus,
    polarization_expand,
    rademacher_average,
    sign_flip,
    symmetrize,
)
from .theorems import CHECKS, CheckReport, SuiteConfig, run_check, run_suite

__version__ = "0.1.0"
