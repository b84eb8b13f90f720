"""Marginal distribution of the measurements and the ABIC objectives.

Integrating beta out of the Gaussian model against its prior leaves the
measurements Gaussian with mean A mu and covariance

    Sigma = W^-1 sigma2 + A W_beta^-1 A^T sigma_beta2.

With the relative weight kappa = sigma2/sigma_beta2 this factors as
Sigma = sigma2 * E, where

    E = W^-1 + A W_beta^-1 A^T / kappa

is the cofactor matrix of the predicted residuals r = y - A mu. Every
selection objective is assembled from the quadratic form r^T E^-1 r and
ln det E, so those two quantities get a dedicated operator type with two
interchangeable computation paths:

``dense``
    factor E itself (n x n); the default for n <= 64.
``lowrank``
    never forms E: the matrix inversion lemma gives
    E^-1 = W - W A (A^T W A + kappa W_beta)^-1 A^T W and the determinant
    lemma gives
    ln det E = ln det(W_beta + A^T W A / kappa) - ln det W - ln det W_beta,
    both needing only t x t factorizations.

All objectives drop the constant -(n/2) ln(2 pi) normalization term; the
full log density is available from log_marginal_density.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import serialize
from ._linalg import spd_factor, spd_logdet, spd_solve, symmetrize
from .errors import DegenerateProblemError, DomainError

__all__ = [
    "DENSE_PATH_MAX_N",
    "ObjectiveCase",
    "ObjectiveValue",
    "MarginalOperators",
    "MarginalWorkspace",
    "SweepRow",
    "marginal_covariance",
    "build_cofactor",
    "log_marginal_density",
    "neg_log_lik_variances",
    "neg_log_lik_kappa",
    "sigma2_hat",
    "abic_case1",
    "abic_case2",
    "split_terms",
    "sweep_objective",
    "write_sweep_csv",
    "SWEEP_HEADER",
]

LOG_2PI = math.log(2.0 * math.pi)

# Largest n for which the auto path factors E directly (square designs
# only; whenever t < n the reduced route is both cheaper and better
# conditioned, so auto always prefers it there).
DENSE_PATH_MAX_N = 64


class ObjectiveCase(enum.Enum):
    CASE1 = "case1"
    CASE1_ZERO_MEAN = "case1-zero-mean"
    CASE2 = "case2"
    CASE2_ZERO_MEAN = "case2-zero-mean"


@dataclass(frozen=True)
class ObjectiveValue:
    """One objective evaluation, split into its two competing terms.

    ``quad_term`` is always the raw quadratic form r^T E^-1 r; the case
    formula decides how it enters ``total`` (through n ln(quad) for
    Case 1, through quad/sigma2 for Case 2 where sigma2 is known).
    """

    total: float
    quad_term: float
    logdet_term: float
    kappa: float
    case_tag: ObjectiveCase
    sigma2: float = None


class MarginalOperators:
    """Quadratic-form and determinant handles for E at a fixed kappa."""

    def __init__(self, workspace, kappa, path):
        self._ws = workspace
        self.kappa = float(kappa)
        self.path = path
        self.n = workspace.n
        self.t = workspace.t
        self._matrix = None
        if path == "dense":
            w_inv, prior_gram = workspace.dense_pieces()
            self._matrix = symmetrize(w_inv + prior_gram / self.kappa)
            self._factor = spd_factor(self._matrix, "cofactor matrix")
            self.logdet = spd_logdet(self._factor)
        else:
            # M = W_beta + A^T W A / kappa carries everything the lemmas need.
            m = symmetrize(workspace.w_beta + workspace.normal / self.kappa)
            self._m_factor = spd_factor(m, "reduced cofactor matrix")
            self.logdet = spd_logdet(self._m_factor) - workspace.logdet_w - workspace.logdet_wbeta

    @property
    def matrix(self):
        """Dense E = W^-1 + A W_beta^-1 A^T / kappa (built lazily)."""
        if self._matrix is None:
            w_inv, prior_gram = self._ws.dense_pieces()
            self._matrix = symmetrize(w_inv + prior_gram / self.kappa)
        return self._matrix

    def covariance(self, sigma2):
        """Marginal covariance sigma2 * E for kappa = sigma2/sigma_beta2."""
        return sigma2 * self.matrix

    def solve(self, rhs):
        """E^-1 rhs for a vector or a matrix of column vectors."""
        rhs = np.asarray(rhs, dtype=float)
        if self.path == "dense":
            return spd_solve(self._factor, rhs)
        ws = self._ws
        w_rhs = ws.problem.w @ rhs
        reduced = spd_solve(self._m_factor, ws.problem.a_matrix.T @ w_rhs)
        return w_rhs - ws.problem.w @ (ws.problem.a_matrix @ reduced) / self.kappa

    def quad_form(self, residual):
        """r^T E^-1 r; columns are handled independently for a matrix input."""
        residual = np.asarray(residual, dtype=float)
        if self.path == "dense":
            solved = spd_solve(self._factor, residual)
            if residual.ndim == 1:
                return float(residual @ solved)
            return np.einsum("ij,ij->j", residual, solved)
        ws = self._ws
        w_res = ws.problem.w @ residual
        gram_res = ws.problem.a_matrix.T @ w_res
        reduced = spd_solve(self._m_factor, gram_res)
        if residual.ndim == 1:
            return float(residual @ w_res - gram_res @ reduced / self.kappa)
        return (
            np.einsum("ij,ij->j", residual, w_res)
            - np.einsum("ij,ij->j", gram_res, reduced) / self.kappa
        )

    def expected_noise_quad(self):
        """tr(E^-1 W^-1): E[r^T E^-1 r]/sigma2 under r ~ N(0, W^-1 sigma2)."""
        ws = self._ws
        if self.path == "dense":
            w_inv, _ = ws.dense_pieces()
            return float(np.trace(spd_solve(self._factor, w_inv)))
        return self.n - float(np.trace(spd_solve(self._m_factor, ws.normal))) / self.kappa


class MarginalWorkspace:
    """Kappa-independent factorizations shared across objective evaluations.

    Holds the factored W and W_beta, the normal matrix A^T W A, and (for
    the dense path, lazily) W^-1 and A W_beta^-1 A^T. Nothing that
    depends on kappa is cached here.
    """

    def __init__(self, problem, w_beta=None):
        self.problem = problem
        self.n = problem.n
        self.t = problem.t
        self.w_beta = np.eye(self.t) if w_beta is None else np.asarray(w_beta, dtype=float)
        if self.w_beta.shape != (self.t, self.t):
            raise DomainError(
                f"w_beta has shape {self.w_beta.shape}, expected ({self.t}, {self.t})"
            )
        self.w_factor = spd_factor(problem.w, "w")
        self.wbeta_factor = spd_factor(self.w_beta, "w_beta")
        self.logdet_w = spd_logdet(self.w_factor)
        self.logdet_wbeta = spd_logdet(self.wbeta_factor)
        wa = problem.w @ problem.a_matrix
        self.normal = symmetrize(problem.a_matrix.T @ wa)
        self._w_inv = None
        self._prior_gram = None

    def dense_pieces(self):
        if self._w_inv is None:
            self._w_inv = symmetrize(spd_solve(self.w_factor, np.eye(self.n)))
            self._prior_gram = symmetrize(
                self.problem.a_matrix @ spd_solve(self.wbeta_factor, self.problem.a_matrix.T)
            )
        return self._w_inv, self._prior_gram

    def operators(self, kappa, path="auto"):
        if not kappa > 0:
            raise DomainError(f"kappa must be positive, got {kappa}")
        if path == "auto":
            # The reduced route wins whenever t < n: one t x t factor per
            # kappa instead of n x n, and its quadratic form stays accurate
            # down to extreme kappa where the assembled E is ill conditioned.
            path = "dense" if (self.t == self.n and self.n <= DENSE_PATH_MAX_N) else "lowrank"
        if path not in ("dense", "lowrank"):
            raise DomainError(f"unknown computation path {path!r}")
        return MarginalOperators(self, kappa, path)

    def residual(self, prior):
        return self.problem.y - self.problem.a_matrix @ prior.mu


def build_cofactor(problem, w_beta=None, kappa=1.0, path="auto"):
    """Operators for E = W^-1 + A W_beta^-1 A^T / kappa at one kappa."""
    return MarginalWorkspace(problem, w_beta).operators(kappa, path)


def marginal_covariance(problem, prior, sigma2, sigma_beta2):
    """Covariance of the marginal measurement distribution.

    Returns W^-1 sigma2 + A W_beta^-1 A^T sigma_beta2 as a dense
    symmetric matrix. sigma_beta2 = 0 is allowed and drops the prior
    term.
    """
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    if sigma_beta2 < 0:
        raise DomainError(f"sigma_beta2 must be nonnegative, got {sigma_beta2}")
    w_factor = spd_factor(problem.w, "w")
    wbeta_factor = spd_factor(prior.w_beta, "w_beta")
    w_inv = spd_solve(w_factor, np.eye(problem.n))
    prior_gram = problem.a_matrix @ spd_solve(wbeta_factor, problem.a_matrix.T)
    return symmetrize(w_inv * sigma2 + prior_gram * sigma_beta2)


def log_marginal_density(problem, prior, sigma2, sigma_beta2, path="auto"):
    """Gaussian log density of y after integrating beta out.

    Equals -(n/2) ln(2 pi) - (1/2) ln det Sigma - (1/2) r^T Sigma^-1 r
    with r = y - A mu, evaluated through the kappa-scaled cofactor so
    large n stays affordable.
    """
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    if not sigma_beta2 > 0:
        raise DomainError(f"sigma_beta2 must be positive, got {sigma_beta2}")
    workspace = MarginalWorkspace(problem, prior.w_beta)
    ops = workspace.operators(sigma2 / sigma_beta2, path)
    residual = workspace.residual(prior)
    logdet_sigma = problem.n * math.log(sigma2) + ops.logdet
    quad_sigma = ops.quad_form(residual) / sigma2
    return -0.5 * problem.n * LOG_2PI - 0.5 * logdet_sigma - 0.5 * quad_sigma


def neg_log_lik_variances(problem, prior, sigma2, sigma_beta2):
    """ln det Sigma + r^T Sigma^-1 r in the (sigma2, sigma_beta2) frame.

    Deliberately computed by factoring Sigma itself (dense, n x n) so it
    stays an independent cross-check of neg_log_lik_kappa.
    """
    sigma = marginal_covariance(problem, prior, sigma2, sigma_beta2)
    factor = spd_factor(sigma, "marginal covariance")
    residual = problem.y - problem.a_matrix @ prior.mu
    return spd_logdet(factor) + float(residual @ spd_solve(factor, residual))


def neg_log_lik_kappa(problem, prior, sigma2, kappa, path="auto"):
    """n ln sigma2 + ln det E + r^T E^-1 r / sigma2 (the kappa frame)."""
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    workspace = MarginalWorkspace(problem, prior.w_beta)
    ops = workspace.operators(kappa, path)
    residual = workspace.residual(prior)
    return (
        problem.n * math.log(sigma2)
        + ops.logdet
        + ops.quad_form(residual) / sigma2
    )


def sigma2_hat(problem, prior, kappa, path="auto"):
    """Variance estimate at fixed kappa: r^T E^-1 r / n.

    With a zero prior mean this is the measurement-only variant whose
    bias the bias module quantifies.
    """
    workspace = MarginalWorkspace(problem, prior.w_beta)
    ops = workspace.operators(kappa, path)
    return ops.quad_form(workspace.residual(prior)) / problem.n


def _case_tag(prior, case1):
    zero_mean = not np.any(prior.mu)
    if case1:
        return ObjectiveCase.CASE1_ZERO_MEAN if zero_mean else ObjectiveCase.CASE1
    return ObjectiveCase.CASE2_ZERO_MEAN if zero_mean else ObjectiveCase.CASE2


def _split(problem, prior, kappa, path):
    workspace = MarginalWorkspace(problem, prior.w_beta)
    ops = workspace.operators(kappa, path)
    return ops.quad_form(workspace.residual(prior)), ops.logdet


def abic_case1(problem, prior, kappa, path="auto"):
    """Concentrated objective n ln(r^T E^-1 r) + ln det E.

    Minimizing this over kappa and then reading the variance off
    sigma2_hat is the both-variances-unknown selection rule. The
    unconcentrated objective relates by
    neg_log_lik_kappa(sigma2_hat(kappa), kappa) = total + n - n ln n.
    """
    quad, logdet = _split(problem, prior, kappa, path)
    if quad <= 0.0:
        raise DegenerateProblemError(
            "y equals A mu exactly; the Case-1 objective takes log of zero"
        )
    total = problem.n * math.log(quad) + logdet
    return ObjectiveValue(total, quad, logdet, float(kappa), _case_tag(prior, case1=True))


def abic_case2(problem, prior, sigma2, kappa, path="auto"):
    """Known-sigma2 objective r^T E^-1 r / sigma2 + ln det E."""
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    quad, logdet = _split(problem, prior, kappa, path)
    total = quad / sigma2 + logdet
    return ObjectiveValue(
        total, quad, logdet, float(kappa), _case_tag(prior, case1=False), sigma2=float(sigma2)
    )


def split_terms(problem, prior, kappa, path="auto"):
    """The raw (quadratic form, log determinant) pair both cases share."""
    return _split(problem, prior, kappa, path)


@dataclass(frozen=True)
class SweepRow:
    kappa: float
    quad_term: float
    logdet_term: float
    objective: float
    case: str


SWEEP_HEADER = "kappa,quad_term,logdet_term,objective,case"


def sweep_objective(
    problem,
    prior,
    case=1,
    sigma2=None,
    log10_bracket=(-12.0, 12.0),
    points=97,
    path="auto",
):
    """Evaluate one ABIC objective on a log-uniform kappa grid.

    Returns one SweepRow per grid point; the trace behind the
    monotonicity diagnostics and the sweep CSV.
    """
    lo, hi = float(log10_bracket[0]), float(log10_bracket[1])
    if not lo < hi:
        raise DomainError(f"bracket must satisfy lo < hi, got ({lo}, {hi})")
    if points < 2:
        raise DomainError(f"need at least 2 grid points, got {points}")
    if case == 2 and sigma2 is None:
        raise DomainError("case 2 requires a known sigma2")
    workspace = MarginalWorkspace(problem, prior.w_beta)
    residual = workspace.residual(prior)
    tag = _case_tag(prior, case1=(case == 1)).value
    rows = []
    for log_kappa in np.linspace(lo, hi, points):
        kappa = 10.0 ** float(log_kappa)
        ops = workspace.operators(kappa, path)
        quad = ops.quad_form(residual)
        logdet = ops.logdet
        if case == 1:
            if quad <= 0.0:
                raise DegenerateProblemError(
                    "y equals A mu exactly; the Case-1 objective takes log of zero"
                )
            objective = problem.n * math.log(quad) + logdet
        else:
            objective = quad / sigma2 + logdet
        rows.append(SweepRow(kappa, quad, logdet, objective, tag))
    return rows


def write_sweep_csv(path, rows):
    """Write sweep rows as CSV at 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(SWEEP_HEADER + "\n")
        for row in rows:
            handle.write(
                ",".join(
                    (
                        serialize.format_float(row.kappa),
                        serialize.format_float(row.quad_term),
                        serialize.format_float(row.logdet_term),
                        serialize.format_float(row.objective),
                        row.case,
                    )
                )
                + "\n"
            )
