# ## What assuming "prior mean = 0" does to the variance estimate
#
# Dropping mu from the residual r = y - A mu leaves the measurement
# vector itself in the quadratic form. Its expectation picks up a signal
# term that does not belong there, while the noise part is damped below
# sigma2. The two effects do not cancel in general.

import numpy as np

import abicreg as ar

# ## A fixture small enough to check by hand
#
# A = [[1], [1]], identity weights, truth beta = 1, kappa = 1/2,
# sigma2 = 1. Expectation of the zero-mean estimate: 0.2 + 0.6 = 0.8.

design = ar.ProblemDesign([[1.0], [1.0]])
truth = ar.GroundTruth.from_design(design, [1.0])

signal, noise = ar.expected_sigma2_terms(design, truth, sigma2=1.0, kappa=0.5)
print("signal leakage:", signal)
print("damped noise:  ", noise)
print("total:         ", signal + noise, "(true sigma2 is 1.0)")

# ## Monte Carlo confirmation

prior = ar.default_prior(1, mu=[1.0])

zero = ar.mc_sigma2_study(design, truth, prior, sigma2=1.0, kappa=0.5,
                          replicates=20000, seed=0, mu_mode=ar.MuMode.ZERO_MU)
print(f"\nmu=0:    mc mean {zero.mc_mean:.4f} +- {zero.mc_std_error:.4f}"
      f"  (formula {zero.analytic_expectation:.4f})")

honest = ar.mc_sigma2_study(design, truth, prior, sigma2=1.0, kappa=0.5,
                            replicates=20000, seed=0, mu_mode=ar.MuMode.TRUE_MU)
print(f"mu=truth: mc mean {honest.mc_mean:.4f} +- {honest.mc_std_error:.4f}"
      f"  (unbiased target {honest.analytic_expectation:.4f})")

# ## Does the bias reach kappa_hat too?
#
# Same data, two analyses per replicate: once with the honest prior
# mean, once with the mean zeroed. Paired draws, so differences in the
# summaries are differences in the method, not in the noise.

design2, exact2 = ar.spectrum_problem(n=24, t=6, decay=4.0, seed=12)
truth2 = ar.GroundTruth.from_design(design2, exact2)
prior2 = ar.default_prior(6, mu=exact2)

study = ar.mc_kappa_study(design2, truth2, prior2, sigma2=1e-6,
                          replicates=200, seed=4)

# With the mean already on target the evidence is happy to clamp the
# prior arbitrarily tight, so kappa_hat for mu=truth piles up at the
# upper bracket edge. The zeroed mean has to keep the prior loose.

print("\nkappa_hat quantiles (5/50/95%):")
print(f"  mu=truth: {study.true_mu.kappa_hat.q05:.2e}"
      f"  {study.true_mu.kappa_hat.q50:.2e}  {study.true_mu.kappa_hat.q95:.2e}")
print(f"  mu=0:     {study.zero_mu.kappa_hat.q05:.2e}"
      f"  {study.zero_mu.kappa_hat.q50:.2e}  {study.zero_mu.kappa_hat.q95:.2e}")
print("sigma2_hat medians:",
      f"mu=truth {study.true_mu.sigma2_hat.q50:.2e},",
      f"mu=0 {study.zero_mu.sigma2_hat.q50:.2e}  (true 1e-6)")
print("boundary fractions:", study.true_mu.boundary_fraction, study.zero_mu.boundary_fraction)
