"""Data model for weighted linear inverse problems with Gaussian priors.

The measurement model is y = A beta + eps with cov(eps) = W^-1 sigma^2,
where W is a symmetric positive definite weight matrix. Prior knowledge
about beta enters as a mean vector mu, a weight matrix W_beta and an
optional variance sigma_beta2, so that cov(beta) = W_beta^-1 sigma_beta2.
The relative weight kappa = sigma2 / sigma_beta2 ties the two variance
components together.
"""

import json
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as la

from . import serialize
from ._linalg import is_symmetric, max_asymmetry, spd_factor
from .errors import DimensionError, DomainError, RankDeficiencyWarning

__all__ = [
    "InverseProblem",
    "ProblemDesign",
    "PriorModel",
    "Hyperparameters",
    "GroundTruth",
    "ValidationCheck",
    "ValidationReport",
    "LoadedProblem",
    "default_prior",
    "validate_problem",
    "condition_estimate",
    "load_problem",
    "save_problem",
]

# Smallest singular value below RANK_TOL_FACTOR * eps * largest counts as
# numerically rank deficient.
RANK_TOL_FACTOR = 1e3


def _as_vector(value, name, length=None):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DimensionError(f"{name} is not a numeric array: {exc}") from exc
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    if length is not None and arr.shape[0] != length:
        raise DimensionError(f"{name} has length {arr.shape[0]}, expected {length}")
    return arr


def _as_square(value, name, size=None):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DimensionError(f"{name} is not a numeric array: {exc}") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be a square matrix, got shape {arr.shape}")
    if size is not None and arr.shape[0] != size:
        raise DimensionError(f"{name} has shape {arr.shape}, expected ({size}, {size})")
    return arr


def _freeze(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def _as_design(value):
    try:
        a = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DimensionError(f"a_matrix is not a numeric array: {exc}") from exc
    if a.ndim != 2:
        raise DimensionError(f"a_matrix must be 2-d, got shape {a.shape}")
    n, t = a.shape
    if n < 1 or t < 1:
        raise DimensionError(f"a_matrix must be nonempty, got shape {a.shape}")
    if n < t:
        raise DimensionError(f"need at least as many rows as columns, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class InverseProblem:
    """One instance of the linear model y = A beta + eps.

    Parameters
    ----------
    a_matrix : (n, t) array
        Design matrix. Full column rank mathematically, but its small
        singular values may sit arbitrarily close to zero.
    y : (n,) array
        Measurement vector.
    w : (n, n) array, optional
        Measurement weight matrix; cov(eps) = W^-1 sigma^2. Identity when
        omitted.
    """

    a_matrix: np.ndarray
    y: np.ndarray
    w: np.ndarray = None

    def __post_init__(self):
        a = _as_design(self.a_matrix)
        n = a.shape[0]
        y = _as_vector(self.y, "y", length=n)
        w = np.eye(n) if self.w is None else _as_square(self.w, "w", size=n)
        object.__setattr__(self, "a_matrix", _freeze(a))
        object.__setattr__(self, "y", _freeze(y))
        object.__setattr__(self, "w", _freeze(w))

    @property
    def n(self):
        return self.a_matrix.shape[0]

    @property
    def t(self):
        return self.a_matrix.shape[1]

    @property
    def design(self):
        return ProblemDesign(self.a_matrix, self.w)


@dataclass(frozen=True)
class ProblemDesign:
    """A design (A, W) without observations; what generators produce."""

    a_matrix: np.ndarray
    w: np.ndarray = None

    def __post_init__(self):
        a = _as_design(self.a_matrix)
        w = np.eye(a.shape[0]) if self.w is None else _as_square(self.w, "w", size=a.shape[0])
        object.__setattr__(self, "a_matrix", _freeze(a))
        object.__setattr__(self, "w", _freeze(w))

    @property
    def n(self):
        return self.a_matrix.shape[0]

    @property
    def t(self):
        return self.a_matrix.shape[1]

    def with_observations(self, y):
        return InverseProblem(self.a_matrix, y, self.w)


@dataclass(frozen=True)
class PriorModel:
    """Prior moments for beta: mean mu and weight W_beta.

    ``sigma_beta2`` scales the prior covariance, cov(beta) =
    W_beta^-1 sigma_beta2; it may be left unset when only the relative
    weight kappa matters. ``mu_assumed_zero`` records that the mean was
    not supplied and a zero vector was substituted; every downstream
    report echoes this flag because forcing mu = 0 biases the variance
    estimates.
    """

    mu: np.ndarray
    w_beta: np.ndarray
    sigma_beta2: float = None
    mu_assumed_zero: bool = field(default=False)

    def __post_init__(self):
        mu = _as_vector(self.mu, "mu")
        w_beta = _as_square(self.w_beta, "w_beta", size=mu.shape[0])
        if self.sigma_beta2 is not None and not self.sigma_beta2 > 0:
            raise DomainError(f"sigma_beta2 must be positive, got {self.sigma_beta2}")
        object.__setattr__(self, "mu", _freeze(mu))
        object.__setattr__(self, "w_beta", _freeze(w_beta))

    @property
    def t(self):
        return self.mu.shape[0]

    def with_zero_mean(self):
        """Copy of this prior with mu forced to zero (and flagged)."""
        return replace(self, mu=np.zeros(self.t), mu_assumed_zero=True)


def default_prior(t, mu=None, w_beta=None, sigma_beta2=None):
    """Build a PriorModel, substituting identity weight and zero mean.

    A zero mean substituted here sets ``mu_assumed_zero`` so the
    substitution stays visible in every report.
    """
    if w_beta is None:
        w_beta = np.eye(t)
    if mu is None:
        return PriorModel(np.zeros(t), w_beta, sigma_beta2, mu_assumed_zero=True)
    return PriorModel(mu, w_beta, sigma_beta2)


@dataclass(frozen=True)
class Hyperparameters:
    """Variance components (sigma2, kappa) with kappa = sigma2/sigma_beta2."""

    sigma2: float
    kappa: float
    sigma_beta2: float = None

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise DomainError(f"sigma2 must be positive, got {self.sigma2}")
        if not self.kappa > 0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")
        if self.sigma_beta2 is not None:
            if not self.sigma_beta2 > 0:
                raise DomainError(f"sigma_beta2 must be positive, got {self.sigma_beta2}")
            expected = self.sigma2 / self.sigma_beta2
            if abs(self.kappa - expected) > 1e-12 * max(abs(self.kappa), abs(expected)):
                raise DomainError(
                    "inconsistent hyperparameters: kappa="
                    f"{self.kappa!r} but sigma2/sigma_beta2={expected!r}"
                )

    @classmethod
    def from_variances(cls, sigma2, sigma_beta2):
        if not sigma_beta2 > 0:
            raise DomainError(f"sigma_beta2 must be positive, got {sigma_beta2}")
        return cls(sigma2, sigma2 / sigma_beta2, sigma_beta2)

    @property
    def prior_variance(self):
        """sigma_beta2, derived from kappa when not stored explicitly."""
        if self.sigma_beta2 is not None:
            return self.sigma_beta2
        return self.sigma2 / self.kappa


@dataclass(frozen=True)
class GroundTruth:
    """True parameters and the noise-free measurements they generate."""

    beta_bar: np.ndarray
    y_bar: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "beta_bar", _freeze(_as_vector(self.beta_bar, "beta_bar")))
        object.__setattr__(self, "y_bar", _freeze(_as_vector(self.y_bar, "y_bar")))

    @classmethod
    def from_design(cls, design, beta_bar):
        """Construct with y_bar = A beta_bar (exact by construction)."""
        beta_bar = _as_vector(beta_bar, "beta_bar", length=design.a_matrix.shape[1])
        return cls(beta_bar, design.a_matrix @ beta_bar)


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    detail: str

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    def to_json(self):
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}

    def __str__(self):
        lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in self.checks]
        return "\n".join(lines)


def _pd_check(mat, name):
    try:
        spd_factor((mat + mat.T) / 2.0, name)
    except Exception as exc:
        return ValidationCheck(f"{name}_positive_definite", False, str(exc))
    return ValidationCheck(
        f"{name}_positive_definite", True, "symmetrized factorization succeeded"
    )


def _symmetry_check(mat, name):
    asym = max_asymmetry(mat)
    return ValidationCheck(
        f"{name}_symmetric",
        is_symmetric(mat),
        f"max relative asymmetry {asym:.3e} (tolerance 1e-12)",
    )


def validate_problem(problem, prior):
    """Run every structural invariant and report each one pass/fail.

    Shape mismatches between the problem and the prior raise
    DimensionError immediately; everything else lands in the report so a
    caller can see all violations at once.
    """
    if prior.t != problem.t:
        raise DimensionError(
            f"mu has length {prior.t} but a_matrix has {problem.t} columns"
        )
    checks = []
    checks.append(
        ValidationCheck(
            "n_ge_t",
            problem.n >= problem.t,
            f"n={problem.n}, t={problem.t}",
        )
    )
    singular_values = la.svdvals(problem.a_matrix)
    smax, smin = float(singular_values[0]), float(singular_values[-1])
    threshold = RANK_TOL_FACTOR * np.finfo(float).eps * smax
    checks.append(
        ValidationCheck(
            "a_full_column_rank",
            smin > threshold,
            f"smallest singular value {smin:.3e}, threshold {threshold:.3e}",
        )
    )
    checks.append(_symmetry_check(problem.w, "w"))
    checks.append(_pd_check(problem.w, "w"))
    checks.append(_symmetry_check(prior.w_beta, "w_beta"))
    checks.append(_pd_check(prior.w_beta, "w_beta"))
    if prior.sigma_beta2 is not None:
        checks.append(
            ValidationCheck(
                "sigma_beta2_positive",
                prior.sigma_beta2 > 0,
                f"sigma_beta2={prior.sigma_beta2!r}",
            )
        )
    return ValidationReport(tuple(checks))


def condition_estimate(problem):
    """2-norm condition number of A (largest over smallest singular value).

    Numerically rank-deficient designs are flagged with
    RankDeficiencyWarning and the ratio is still returned as computed.
    """
    singular_values = la.svdvals(problem.a_matrix)
    smax, smin = float(singular_values[0]), float(singular_values[-1])
    if smin <= RANK_TOL_FACTOR * np.finfo(float).eps * smax:
        warnings.warn(
            f"a_matrix is numerically rank deficient (smallest singular value {smin:.3e})",
            RankDeficiencyWarning,
            stacklevel=2,
        )
    if smin == 0.0:
        return float("inf")
    return smax / smin


_PROBLEM_KEYS = {"A", "y", "W", "W_beta", "mu", "sigma2", "sigma_beta2"}


@dataclass(frozen=True)
class LoadedProblem:
    """A problem file after defaults are resolved."""

    problem: InverseProblem
    prior: PriorModel
    sigma2: float = None
    sigma_beta2: float = None

    @property
    def mu_assumed_zero(self):
        return self.prior.mu_assumed_zero


def load_problem(path):
    """Read the JSON problem-file format.

    Keys: ``A`` (row-major nested lists), ``y``, and optionally ``W``,
    ``W_beta``, ``mu``, ``sigma2``, ``sigma_beta2``. Missing weights mean
    identity; a missing ``mu`` means the zero vector, recorded via
    ``mu_assumed_zero`` on the prior.
    """
    with open(path, "r", encoding="utf-8") as handle:
        raw = json.load(handle)
    if not isinstance(raw, dict):
        raise DomainError(f"problem file must hold a JSON object, got {type(raw).__name__}")
    unknown = set(raw) - _PROBLEM_KEYS
    if unknown:
        raise DomainError(f"unknown problem-file keys: {sorted(unknown)}")
    for key in ("A", "y"):
        if key not in raw:
            raise DomainError(f"problem file is missing required key {key!r}")
    try:
        a = np.asarray(raw["A"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"key 'A' is not a numeric matrix: {exc}") from exc
    problem = InverseProblem(a, raw["y"], raw.get("W"))
    sigma2 = raw.get("sigma2")
    sigma_beta2 = raw.get("sigma_beta2")
    if sigma2 is not None and not float(sigma2) > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    prior = default_prior(
        problem.t,
        mu=raw.get("mu"),
        w_beta=raw.get("W_beta"),
        sigma_beta2=None if sigma_beta2 is None else float(sigma_beta2),
    )
    return LoadedProblem(
        problem,
        prior,
        None if sigma2 is None else float(sigma2),
        None if sigma_beta2 is None else float(sigma_beta2),
    )


def save_problem(path, problem, prior=None, sigma2=None, sigma_beta2=None):
    """Write the JSON problem-file format (17 significant digits).

    Identity weights are omitted rather than materialized; a prior whose
    mean was assumed zero is written without a ``mu`` key so the flag
    survives a round trip.
    """
    doc = {"A": problem.a_matrix, "y": problem.y}
    if not np.array_equal(problem.w, np.eye(problem.n)):
        doc["W"] = problem.w
    if prior is not None:
        if not np.array_equal(prior.w_beta, np.eye(prior.t)):
            doc["W_beta"] = prior.w_beta
        if not prior.mu_assumed_zero:
            doc["mu"] = prior.mu
        if prior.sigma_beta2 is not None:
            doc["sigma_beta2"] = prior.sigma_beta2
    if sigma2 is not None:
        doc["sigma2"] = sigma2
    if sigma_beta2 is not None and "sigma_beta2" not in doc:
        doc["sigma_beta2"] = sigma_beta2
    serialize.dump(doc, path)
