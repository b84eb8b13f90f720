"""Bias of the variance estimates when the prior mean is forced to zero.

The variance estimate at fixed kappa is r^T E^-1 r / n with
r = y - A mu. Substituting mu = 0 turns the residual into the raw
measurement vector, and its expectation under y = ybar + eps becomes

    E[.] = ybar^T E^-1 ybar / n + tr(E^-1 W^-1) sigma2 / n,

a signal term that should not be there plus a damped noise term. This
module evaluates that formula and verifies it by seeded Monte Carlo.

Two sampling frames appear, on purpose. The claim that the variance
estimate with the correct prior mean is unbiased holds only when the
parameter vector itself is drawn from the prior (so the residual
covariance is the full marginal covariance); the bias formula above
instead conditions on a fixed true parameter vector. TrueMu studies
therefore draw a fresh beta from the prior per replicate, ZeroMu studies
keep beta fixed at the ground truth. The kappa-hat study pairs both
analysis modes on identical fixed-truth draws, since the question there
is what the zero-mean shortcut does to the same data.

Per-replicate randomness comes from a counter construction: replicate r
uses PCG64 seeded with SeedSequence(seed, spawn_key=(r,)), so replicates
are order-independent and safe to parallelize. The noise draw always
consumes the stream first, which keeps the noise identical across modes
that share a replicate index.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from ._linalg import lower_cholesky
from .errors import AbicregError, DomainError, EvaluationError
from .marginal import MarginalWorkspace
from .selection import DEFAULT_BRACKET, DEFAULT_REL_TOL, BoundaryFlag, select_case1, select_case2

__all__ = [
    "RNG_DESCRIPTION",
    "MuMode",
    "BiasReport",
    "QuantileSummary",
    "ModeSummary",
    "KappaStudyReport",
    "replicate_stream",
    "draw_noise",
    "expected_sigma2_terms",
    "expected_sigma2_mu_zero",
    "mc_sigma2_study",
    "mc_kappa_study",
]

RNG_DESCRIPTION = "numpy PCG64, SeedSequence(seed, spawn_key=(replicate,))"

MIN_REPLICATES = 100


class MuMode(enum.Enum):
    TRUE_MU = "true"
    ZERO_MU = "zero"


def replicate_stream(seed, replicate):
    """Independent generator for one replicate of a seeded study."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replicate,)))


def _solve_against_factor(lower, z):
    # lower @ lower.T = weight; returns x with cov(x) = weight^-1
    if np.array_equal(lower, np.eye(lower.shape[0])):
        return z
    return la.solve_triangular(lower, z, trans="T", lower=True, check_finite=False)


def draw_noise(w, sigma2, rng):
    """One draw of eps ~ N(0, W^-1 sigma2).

    Standard normals are solved against the transposed Cholesky factor
    of W, so only a factorization of the weight matrix is ever needed.
    """
    if sigma2 < 0:
        raise DomainError(f"sigma2 must be nonnegative, got {sigma2}")
    w = np.asarray(w, dtype=float)
    lower = lower_cholesky(w, "w")
    z = rng.standard_normal(w.shape[0])
    return math.sqrt(sigma2) * _solve_against_factor(lower, z)


@dataclass(frozen=True)
class BiasReport:
    """Monte Carlo estimate of E[sigma2_hat] next to its analytic value."""

    analytic_expectation: float
    mc_mean: float
    mc_std_error: float
    replicates: int
    seed: int
    kappa_used: float
    true_sigma2: float
    mu_mode: MuMode
    sampling: str
    rng: str = RNG_DESCRIPTION

    def to_json(self):
        return {
            "analytic_expectation": self.analytic_expectation,
            "mc_mean": self.mc_mean,
            "mc_std_error": self.mc_std_error,
            "replicates": self.replicates,
            "seed": self.seed,
            "kappa_used": self.kappa_used,
            "true_sigma2": self.true_sigma2,
            "mu_mode": self.mu_mode.value,
            "sampling": self.sampling,
            "rng": self.rng,
        }


def expected_sigma2_terms(design, ground_truth, sigma2, kappa, w_beta=None):
    """(signal term, noise term) of the zero-mean variance expectation.

    signal = ybar^T E^-1 ybar / n, noise = tr(E^-1 W^-1) sigma2 / n.
    Both are nonnegative and the noise term never exceeds sigma2.
    """
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    problem = design.with_observations(np.zeros(design.n))
    workspace = MarginalWorkspace(problem, w_beta)
    ops = workspace.operators(kappa)
    signal = ops.quad_form(ground_truth.y_bar) / design.n
    noise = ops.expected_noise_quad() * sigma2 / design.n
    return signal, noise


def expected_sigma2_mu_zero(design, ground_truth, sigma2, kappa, w_beta=None):
    """Expectation of the zero-prior-mean variance estimate at fixed kappa."""
    signal, noise = expected_sigma2_terms(design, ground_truth, sigma2, kappa, w_beta)
    return signal + noise


def _noise_block(design, sigma2, seed, replicates, extra_draws=0):
    """Stack per-replicate noise columns; optionally collect extra draws.

    Returns (eps columns (n, R), extra standard-normal columns or None).
    Each replicate consumes its own stream, noise first.
    """
    n = design.n
    lower = lower_cholesky(design.w, "w")
    z_eps = np.empty((n, replicates))
    z_extra = np.empty((extra_draws, replicates)) if extra_draws else None
    for r in range(replicates):
        rng = replicate_stream(seed, r)
        z_eps[:, r] = rng.standard_normal(n)
        if extra_draws:
            z_extra[:, r] = rng.standard_normal(extra_draws)
    if np.array_equal(lower, np.eye(n)):
        eps = math.sqrt(sigma2) * z_eps
    else:
        eps = math.sqrt(sigma2) * la.solve_triangular(
            lower, z_eps, trans="T", lower=True, check_finite=False
        )
    return eps, z_extra


def mc_sigma2_study(
    design,
    ground_truth,
    prior,
    sigma2,
    kappa,
    replicates=20000,
    seed=0,
    mu_mode=MuMode.ZERO_MU,
):
    """Monte Carlo check of the variance estimate at fixed kappa.

    TrueMu mode draws beta from the prior (with sigma_beta2 =
    sigma2/kappa) plus noise and analyzes with mu; its analytic
    expectation is sigma2 itself. ZeroMu mode holds beta at the ground
    truth, analyzes with mu = 0, and compares against
    expected_sigma2_mu_zero.
    """
    mu_mode = MuMode(mu_mode)
    if replicates < MIN_REPLICATES:
        raise DomainError(f"replicates must be at least {MIN_REPLICATES}, got {replicates}")
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    n, t = design.n, design.t
    problem = design.with_observations(np.zeros(n))
    workspace = MarginalWorkspace(problem, prior.w_beta)
    ops = workspace.operators(kappa)

    if mu_mode is MuMode.TRUE_MU:
        eps, z_beta = _noise_block(design, sigma2, seed, replicates, extra_draws=t)
        beta_lower = lower_cholesky(prior.w_beta, "w_beta")
        sigma_beta = math.sqrt(sigma2 / kappa)
        if np.array_equal(beta_lower, np.eye(t)):
            beta_dev = sigma_beta * z_beta
        else:
            beta_dev = sigma_beta * la.solve_triangular(
                beta_lower, z_beta, trans="T", lower=True, check_finite=False
            )
        # residual y - A mu = A (beta - mu) + eps
        residuals = design.a_matrix @ beta_dev + eps
        analytic = float(sigma2)
        sampling = "prior-draw"
    else:
        eps, _ = _noise_block(design, sigma2, seed, replicates)
        # mu = 0, so the residual is the measurement vector itself
        residuals = ground_truth.y_bar[:, None] + eps
        analytic = expected_sigma2_mu_zero(design, ground_truth, sigma2, kappa, prior.w_beta)
        sampling = "fixed-truth"

    estimates = ops.quad_form(residuals) / n
    mc_mean = float(np.mean(estimates))
    mc_std_error = float(np.std(estimates, ddof=1) / math.sqrt(replicates))
    return BiasReport(
        analytic_expectation=analytic,
        mc_mean=mc_mean,
        mc_std_error=mc_std_error,
        replicates=int(replicates),
        seed=int(seed),
        kappa_used=float(kappa),
        true_sigma2=float(sigma2),
        mu_mode=mu_mode,
        sampling=sampling,
    )


@dataclass(frozen=True)
class QuantileSummary:
    q05: float
    q25: float
    q50: float
    q75: float
    q95: float

    @classmethod
    def from_samples(cls, values):
        qs = np.quantile(np.asarray(values, dtype=float), [0.05, 0.25, 0.50, 0.75, 0.95])
        return cls(*(float(q) for q in qs))

    def to_json(self):
        return {
            "q05": self.q05,
            "q25": self.q25,
            "q50": self.q50,
            "q75": self.q75,
            "q95": self.q95,
        }


@dataclass(frozen=True)
class ModeSummary:
    kappa_hat: QuantileSummary
    sigma2_hat: QuantileSummary
    sigma_beta2_hat: QuantileSummary
    boundary_fraction: float
    failures: int

    def to_json(self):
        return {
            "kappa_hat": self.kappa_hat.to_json(),
            "sigma2_hat": self.sigma2_hat.to_json(),
            "sigma_beta2_hat": self.sigma_beta2_hat.to_json(),
            "boundary_fraction": self.boundary_fraction,
            "failures": self.failures,
        }


@dataclass(frozen=True)
class KappaStudyReport:
    """Paired selection results under the true and the zeroed prior mean.

    ``median_kappa_hat_difference`` is median(zero mu) - median(true mu);
    its sign is reported, not asserted, because the direction depends on
    how much signal the zero-mean residuals absorb.
    """

    true_mu: ModeSummary
    zero_mu: ModeSummary
    median_kappa_hat_difference: float
    replicates: int
    seed: int
    case: int
    true_sigma2: float
    rng: str = RNG_DESCRIPTION

    def to_json(self):
        return {
            "true_mu": self.true_mu.to_json(),
            "zero_mu": self.zero_mu.to_json(),
            "median_kappa_hat_difference": self.median_kappa_hat_difference,
            "replicates": self.replicates,
            "seed": self.seed,
            "case": self.case,
            "true_sigma2": self.true_sigma2,
            "rng": self.rng,
        }


def mc_kappa_study(
    design,
    ground_truth,
    prior,
    sigma2,
    replicates=500,
    seed=0,
    case=1,
    log10_bracket=DEFAULT_BRACKET,
    rel_tol=DEFAULT_REL_TOL,
):
    """Distribution of the selected hyperparameters under both mu modes.

    Every replicate draws one fixed-truth measurement vector
    y = ybar + eps and runs the full selection twice: once with the
    supplied prior and once with its mean zeroed. Optimizer failures are
    counted per mode, never silently dropped.
    """
    if replicates < MIN_REPLICATES:
        raise DomainError(f"replicates must be at least {MIN_REPLICATES}, got {replicates}")
    if case not in (1, 2):
        raise DomainError(f"case must be 1 or 2, got {case}")
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    eps, _ = _noise_block(design, sigma2, seed, replicates)
    priors = {MuMode.TRUE_MU: prior, MuMode.ZERO_MU: prior.with_zero_mean()}
    samples = {
        mode: {"kappa_hat": [], "sigma2_hat": [], "sigma_beta2_hat": [], "boundary": 0, "failures": 0}
        for mode in priors
    }
    for r in range(replicates):
        problem = design.with_observations(ground_truth.y_bar + eps[:, r])
        for mode, mode_prior in priors.items():
            bucket = samples[mode]
            try:
                if case == 1:
                    result = select_case1(problem, mode_prior, log10_bracket, rel_tol)
                else:
                    result = select_case2(problem, mode_prior, sigma2, log10_bracket, rel_tol)
            except AbicregError:
                bucket["failures"] += 1
                continue
            bucket["kappa_hat"].append(result.kappa_hat)
            bucket["sigma2_hat"].append(result.sigma2_hat)
            bucket["sigma_beta2_hat"].append(result.sigma_beta2_hat)
            if result.boundary_flag is not BoundaryFlag.INTERIOR:
                bucket["boundary"] += 1

    summaries = {}
    for mode, bucket in samples.items():
        successes = len(bucket["kappa_hat"])
        if successes == 0:
            raise EvaluationError(f"selection failed on every replicate in {mode.value} mode")
        summaries[mode] = ModeSummary(
            kappa_hat=QuantileSummary.from_samples(bucket["kappa_hat"]),
            sigma2_hat=QuantileSummary.from_samples(bucket["sigma2_hat"]),
            sigma_beta2_hat=QuantileSummary.from_samples(bucket["sigma_beta2_hat"]),
            boundary_fraction=bucket["boundary"] / successes,
            failures=bucket["failures"],
        )
    return KappaStudyReport(
        true_mu=summaries[MuMode.TRUE_MU],
        zero_mu=summaries[MuMode.ZERO_MU],
        median_kappa_hat_difference=(
            summaries[MuMode.ZERO_MU].kappa_hat.q50 - summaries[MuMode.TRUE_MU].kappa_hat.q50
        ),
        replicates=int(replicates),
        seed=int(seed),
        case=int(case),
        true_sigma2=float(sigma2),
    )
