# ## The marginal likelihood as a function of the hyperparameters
#
# Integrating the parameters out of the joint density leaves a Gaussian
# in the data alone. Its negative log, up to constants, splits into a
# misfit part that grows with kappa and a determinant part that shrinks.

import numpy as np

import abicreg as ar

design, exact = ar.phillips_problem(32)
y, _ = ar.synthesize_observations(design, exact, sigma2=1e-4, seed=3)
problem = design.with_observations(y)
prior = ar.default_prior(32)  # mean zero, identity weight

# ## The two competing terms

rows = ar.sweep_objective(problem, prior, case=1, log10_bracket=(-10, 6), points=17)
print(f"{'kappa':>10}  {'quad':>12}  {'logdet':>12}  {'objective':>12}")
for row in rows:
    print(f"{row.kappa:10.1e}  {row.quad_term:12.4e}  {row.logdet_term:12.4f}  {row.objective:12.4f}")

# quad_term only climbs, logdet_term only falls; their weighted sum has
# an interior minimum.

# ## Tabulating for a plotting tool

ar.write_sweep_csv("sweep.csv", ar.sweep_objective(problem, prior, case=1))
print("\nwrote sweep.csv with", 97, "rows")

# ## Consistency between the two parameterizations

sigma2, sigma_beta2 = 2e-4, 1e-1
same = ar.neg_log_lik_variances(problem, prior, sigma2, sigma_beta2)
also = ar.neg_log_lik_kappa(problem, prior, sigma2, sigma2 / sigma_beta2)
print("\nvariances form:", same)
print("kappa form:    ", also)

# And the closed-form variance estimate at fixed kappa:

kappa = 1e-4
print("sigma2_hat at kappa=1e-4:", ar.sigma2_hat(problem, prior, kappa))
