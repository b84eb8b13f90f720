import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import abicreg as ar
from conftest import random_design, random_prior, tiny_fixture


class TestReplicateStream:
    def test_replicates_are_order_independent(self):
        a = ar.replicate_stream(7, 3).standard_normal(5)
        ar.replicate_stream(7, 0).standard_normal(100)
        b = ar.replicate_stream(7, 3).standard_normal(5)
        assert np.array_equal(a, b)

    def test_replicates_differ(self):
        a = ar.replicate_stream(7, 0).standard_normal(5)
        b = ar.replicate_stream(7, 1).standard_normal(5)
        assert not np.array_equal(a, b)


class TestDrawNoise:
    def test_identity_weight_is_plain_gaussian(self):
        rng1 = ar.replicate_stream(0, 0)
        rng2 = ar.replicate_stream(0, 0)
        eps = ar.draw_noise(np.eye(4), 4.0, rng1)
        z = rng2.standard_normal(4)
        assert_allclose(eps, 2.0 * z, rtol=1e-15)

    def test_covariance_matches_inverse_weight(self):
        rng = np.random.default_rng(1)
        w = np.diag([1.0, 4.0, 0.25])
        draws = np.array([ar.draw_noise(w, 2.0, ar.replicate_stream(1, r)) for r in range(4000)])
        var = draws.var(axis=0)
        assert_allclose(var, 2.0 / np.diag(w), rtol=0.15)

    def test_negative_variance_rejected(self):
        with pytest.raises(ar.DomainError):
            ar.draw_noise(np.eye(2), -1.0, np.random.default_rng(0))


class TestExpectedSigma2:
    def test_closed_form_fixture(self):
        design, _, _, truth = tiny_fixture()
        signal, noise = ar.expected_sigma2_terms(design, truth, sigma2=1.0, kappa=0.5)
        assert signal == pytest.approx(0.2, rel=1e-12)
        assert noise == pytest.approx(0.6, rel=1e-12)
        assert ar.expected_sigma2_mu_zero(design, truth, 1.0, 0.5) == pytest.approx(
            0.8, rel=1e-12
        )

    def test_terms_nonnegative_and_noise_bounded(self):
        rng = np.random.default_rng(40)
        for _ in range(20):
            n = int(rng.integers(2, 20))
            t = int(rng.integers(1, min(n, 5) + 1))
            design = random_design(rng, n, t)
            truth = ar.GroundTruth.from_design(design, rng.standard_normal(t))
            sigma2 = 10.0 ** rng.uniform(-2, 2)
            kappa = 10.0 ** rng.uniform(-4, 4)
            signal, noise = ar.expected_sigma2_terms(design, truth, sigma2, kappa)
            assert signal >= 0.0
            assert 0.0 <= noise <= sigma2 * (1.0 + 1e-12)

    def test_large_kappa_removes_damping(self):
        # kappa -> inf pins the prior, E -> W^-1, so the noise term -> sigma2
        design, _, _, truth = tiny_fixture()
        signal, noise = ar.expected_sigma2_terms(design, truth, 1.0, 1e12)
        assert noise == pytest.approx(1.0, rel=1e-9)
        assert signal == pytest.approx(1.0, rel=1e-9)  # ybar^T W ybar / n for y=[1,1]


class TestMcSigma2Study:
    def test_zero_mu_matches_formula_on_fixture(self):
        design, _, prior, truth = tiny_fixture()
        report = ar.mc_sigma2_study(
            design, truth, prior, sigma2=1.0, kappa=0.5, replicates=4000, seed=2
        )
        assert report.analytic_expectation == pytest.approx(0.8, rel=1e-12)
        assert abs(report.mc_mean - report.analytic_expectation) < 3.0 * report.mc_std_error
        assert report.sampling == "fixed-truth"
        assert report.mu_mode is ar.MuMode.ZERO_MU

    def test_true_mu_is_unbiased(self):
        rng = np.random.default_rng(41)
        design = random_design(rng, 10, 3)
        truth = ar.GroundTruth.from_design(design, rng.standard_normal(3))
        prior = random_prior(rng, 3)
        report = ar.mc_sigma2_study(
            design,
            truth,
            prior,
            sigma2=0.5,
            kappa=2.0,
            replicates=4000,
            seed=3,
            mu_mode=ar.MuMode.TRUE_MU,
        )
        assert report.analytic_expectation == pytest.approx(0.5)
        assert abs(report.mc_mean - 0.5) < 3.0 * report.mc_std_error
        assert report.sampling == "prior-draw"

    def test_deterministic_given_seed(self):
        design, _, prior, truth = tiny_fixture()
        kwargs = dict(sigma2=1.0, kappa=0.5, replicates=200, seed=5)
        a = ar.mc_sigma2_study(design, truth, prior, **kwargs)
        b = ar.mc_sigma2_study(design, truth, prior, **kwargs)
        assert a == b

    def test_replicate_floor(self):
        design, _, prior, truth = tiny_fixture()
        with pytest.raises(ar.DomainError):
            ar.mc_sigma2_study(design, truth, prior, 1.0, 0.5, replicates=50)

    def test_json_payload(self):
        design, _, prior, truth = tiny_fixture()
        doc = ar.mc_sigma2_study(design, truth, prior, 1.0, 0.5, replicates=150, seed=1).to_json()
        assert doc["mu_mode"] == "zero"
        assert doc["replicates"] == 150
        assert "PCG64" in doc["rng"]


class TestMcKappaStudy:
    def make_inputs(self):
        design, exact = ar.spectrum_problem(16, 4, decay=3.0, seed=8)
        truth = ar.GroundTruth.from_design(design, exact)
        prior = ar.default_prior(4, mu=exact)
        return design, truth, prior

    def test_report_structure_and_quantile_order(self):
        design, truth, prior = self.make_inputs()
        report = ar.mc_kappa_study(design, truth, prior, sigma2=1e-4, replicates=100, seed=6)
        for summary in (report.true_mu, report.zero_mu):
            for q in (summary.kappa_hat, summary.sigma2_hat, summary.sigma_beta2_hat):
                assert q.q05 <= q.q25 <= q.q50 <= q.q75 <= q.q95
            assert 0.0 <= summary.boundary_fraction <= 1.0
            assert summary.failures == 0
        assert report.median_kappa_hat_difference == pytest.approx(
            report.zero_mu.kappa_hat.q50 - report.true_mu.kappa_hat.q50
        )

    def test_modes_share_noise_draws(self):
        # pairing: replicate r sees the same y in both modes, so with the
        # prior mean already zero the two summaries coincide exactly
        design, truth, _ = self.make_inputs()
        zero_prior = ar.default_prior(4)
        report = ar.mc_kappa_study(design, truth, zero_prior, sigma2=1e-4, replicates=100, seed=7)
        assert report.true_mu == report.zero_mu
        assert report.median_kappa_hat_difference == 0.0

    def test_case2_variant(self):
        design, truth, prior = self.make_inputs()
        report = ar.mc_kappa_study(
            design, truth, prior, sigma2=1e-4, replicates=100, seed=8, case=2
        )
        assert report.case == 2
        # case 2 echoes the supplied sigma2 for every replicate
        assert report.true_mu.sigma2_hat.q05 == pytest.approx(1e-4)
        assert report.true_mu.sigma2_hat.q95 == pytest.approx(1e-4)

    def test_determinism(self):
        design, truth, prior = self.make_inputs()
        a = ar.mc_kappa_study(design, truth, prior, sigma2=1e-4, replicates=100, seed=9)
        b = ar.mc_kappa_study(design, truth, prior, sigma2=1e-4, replicates=100, seed=9)
        assert a == b

    def test_replicate_floor(self):
        design, truth, prior = self.make_inputs()
        with pytest.raises(ar.DomainError):
            ar.mc_kappa_study(design, truth, prior, sigma2=1e-4, replicates=10)

    def test_bad_case_rejected(self):
        design, truth, prior = self.make_inputs()
        with pytest.raises(ar.DomainError):
            ar.mc_kappa_study(design, truth, prior, sigma2=1e-4, replicates=100, case=3)
