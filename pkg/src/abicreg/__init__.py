"""Regularized linear inverse problems with marginal-likelihood tuning.

The package solves ill-conditioned least squares problems through a
Gaussian prior, scores hyperparameters by the marginal likelihood of the
data, and quantifies what goes wrong when the prior mean is assumed zero
out of convenience.
"""

from .errors import (
    AbicregError,
    DegenerateProblemError,
    DimensionError,
    DomainError,
    EvaluationError,
    FactorizationError,
    RankDeficiencyWarning,
    SingularMatrixError,
)
from .model import (
    GroundTruth,
    Hyperparameters,
    InverseProblem,
    LoadedProblem,
    PriorModel,
    ProblemDesign,
    ValidationCheck,
    ValidationReport,
    condition_estimate,
    default_prior,
    load_problem,
    save_problem,
    validate_problem,
)
from .estimators import (
    Estimate,
    EstimatorMethod,
    bayes_estimate,
    bayes_zero_mean_estimate,
    log_joint_density,
    log_posterior_density,
    ls_estimate,
    regularized_estimate,
)
from .marginal import (
    DENSE_PATH_MAX_N,
    MarginalOperators,
    MarginalWorkspace,
    ObjectiveCase,
    ObjectiveValue,
    SweepRow,
    abic_case1,
    abic_case2,
    build_cofactor,
    log_marginal_density,
    marginal_covariance,
    neg_log_lik_kappa,
    neg_log_lik_variances,
    sigma2_hat,
    split_terms,
    sweep_objective,
    write_sweep_csv,
)
from .selection import (
    BoundaryFlag,
    ScalarMinimum,
    SelectionResult,
    minimize_scalar,
    select_case1,
    select_case2,
)
from .bias import (
    BiasReport,
    KappaStudyReport,
    ModeSummary,
    MuMode,
    QuantileSummary,
    draw_noise,
    expected_sigma2_mu_zero,
    expected_sigma2_terms,
    mc_kappa_study,
    mc_sigma2_study,
    replicate_stream,
)
from .problems import (
    GeneratorKind,
    GeneratorSpec,
    generate_problem,
    phillips_problem,
    spectrum_problem,
    synthesize_observations,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AbicregError",
    "DegenerateProblemError",
    "DimensionError",
    "DomainError",
    "EvaluationError",
    "FactorizationError",
    "RankDeficiencyWarning",
    "SingularMatrixError",
    "GroundTruth",
    "Hyperparameters",
    "InverseProblem",
    "LoadedProblem",
    "PriorModel",
    "ProblemDesign",
    "ValidationCheck",
    "ValidationReport",
    "condition_estimate",
    "default_prior",
    "load_problem",
    "save_problem",
    "validate_problem",
    "Estimate",
    "EstimatorMethod",
    "bayes_estimate",
    "bayes_zero_mean_estimate",
    "log_joint_density",
    "log_posterior_density",
    "ls_estimate",
    "regularized_estimate",
    "DENSE_PATH_MAX_N",
    "MarginalOperators",
    "MarginalWorkspace",
    "ObjectiveCase",
    "ObjectiveValue",
    "SweepRow",
    "abic_case1",
    "abic_case2",
    "build_cofactor",
    "log_marginal_density",
    "marginal_covariance",
    "neg_log_lik_kappa",
    "neg_log_lik_variances",
    "sigma2_hat",
    "split_terms",
    "sweep_objective",
    "write_sweep_csv",
    "BoundaryFlag",
    "ScalarMinimum",
    "SelectionResult",
    "minimize_scalar",
    "select_case1",
    "select_case2",
    "BiasReport",
    "KappaStudyReport",
    "ModeSummary",
    "MuMode",
    "QuantileSummary",
    "draw_noise",
    "expected_sigma2_mu_zero",
    "expected_sigma2_terms",
    "mc_kappa_study",
    "mc_sigma2_study",
    "replicate_stream",
    "GeneratorKind",
    "GeneratorSpec",
    "generate_problem",
    "phillips_problem",
    "spectrum_problem",
    "synthesize_observations",
]
