"""Minimax lower bounds for statistical estimation under differential privacy.

The package computes two-point and multi-hypothesis testing lower bounds under
pure/approximate DP and zero-concentrated DP, builds the couplings and
packings those bounds are instantiated with, runs reference private
mechanisms (including noisy projected stochastic gradient ascent), verifies
every claim exhaustively on small finite mechanisms, and reproduces the
worked examples with seeded Monte-Carlo experiments.
"""

__version__ = "0.1.0"

from .errors import (
    ArityMismatch,
    BudgetExhausted,
    DegenerateInput,
    DegenerateMarginal,
    DomainError,
    DPMinimaxError,
    FormMismatch,
    InsufficientBudget,
    KindConstraintMismatch,
    LengthMismatch,
    NonFinite,
    OutOfSpace,
    RegimeError,
    ShapeMismatch,
    TooLarge,
    UnsupportedPair,
)
from ._rng import derived_rng, spawn_keys
from .divergences import (
    Bernoulli,
    DiscreteDistribution,
    IsotropicGaussian,
    UniformSupport,
    closed_form,
    kl,
    pinsker_tv_upper,
    renyi,
    tensorize_kl,
    tv,
)
from .bounds import (
    BoundResult,
    PrivacyConstraint,
    fano_classical,
    fano_private,
    kl_quadratic_bounds,
    le_cam_classical,
    le_cam_private,
    minimax_from_packing,
)
from .couplings import (
    CouplingSampler,
    DisagreementMatrix,
    estimate_disagreement,
    exponential_races,
    maximal_pair,
    min_disagreement_lp,
    product_lift,
    shared_uniform_bernoulli,
)
from .packings import (
    BinaryCode,
    Packing,
    scale_code,
    two_point,
    varshamov_gilbert,
)
from .mechanisms import (
    Ball,
    Box,
    DPSGMLConfig,
    ParametricModel,
    dp_sgml,
    dp_sgml_batch,
    dp_sgml_config,
    estimate_xi2,
    gaussian_mean,
    gaussian_mean_model,
    identity_kernel,
    laplace_mean,
    mle_pga,
    project,
    randomized_response,
    rr_kernel,
    rr_sum_kernel,
)
from .verify import (
    AdmissibilityCheck,
    Dataset,
    FiniteMechanism,
    PrivacyCheck,
    hamming,
    midpoint_anchor,
    similarity,
    verify_admissibility,
    verify_group_privacy,
    verify_kl_dp,
    verify_privacy,
    verify_transport_bound,
)
from .experiments import (
    CellResult,
    ExperimentReport,
    RiskEstimate,
    monte_carlo_risk,
    rate_slope,
    run_bernoulli,
    run_dpsgml,
    run_gaussian,
    run_uniform,
)

__all__ = [
    "__version__",
    "DPMinimaxError",
    "DomainError",
    "ShapeMismatch",
    "LengthMismatch",
    "UnsupportedPair",
    "DegenerateMarginal",
    "TooLarge",
    "FormMismatch",
    "KindConstraintMismatch",
    "ArityMismatch",
    "OutOfSpace",
    "BudgetExhausted",
    "InsufficientBudget",
    "NonFinite",
    "DegenerateInput",
    "RegimeError",
    "derived_rng",
    "spawn_keys",
    "DiscreteDistribution",
    "Bernoulli",
    "IsotropicGaussian",
    "UniformSupport",
    "tv",
    "kl",
    "renyi",
    "closed_form",
    "pinsker_tv_upper",
    "tensorize_kl",
    "PrivacyConstraint",
    "BoundResult",
    "le_cam_classical",
    "fano_classical",
    "le_cam_private",
    "fano_private",
    "minimax_from_packing",
    "kl_quadratic_bounds",
    "CouplingSampler",
    "DisagreementMatrix",
    "maximal_pair",
    "shared_uniform_bernoulli",
    "exponential_races",
    "product_lift",
    "estimate_disagreement",
    "min_disagreement_lp",
    "BinaryCode",
    "Packing",
    "varshamov_gilbert",
    "scale_code",
    "two_point",
    "Ball",
    "Box",
    "project",
    "laplace_mean",
    "gaussian_mean",
    "randomized_response",
    "rr_kernel",
    "rr_sum_kernel",
    "identity_kernel",
    "FiniteMechanism",
    "ParametricModel",
    "gaussian_mean_model",
    "DPSGMLConfig",
    "dp_sgml_config",
    "dp_sgml",
    "dp_sgml_batch",
    "mle_pga",
    "estimate_xi2",
    "Dataset",
    "hamming",
    "midpoint_anchor",
    "similarity",
    "PrivacyCheck",
    "AdmissibilityCheck",
    "verify_privacy",
    "verify_group_privacy",
    "verify_kl_dp",
    "verify_admissibility",
    "verify_transport_bound",
    "RiskEstimate",
    "CellResult",
    "ExperimentReport",
    "monte_carlo_risk",
    "rate_slope",
    "run_bernoulli",
    "run_gaussian",
    "run_uniform",
    "run_dpsgml",
]
