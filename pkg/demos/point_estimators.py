# ## Why plain least squares falls apart on an ill-posed problem
#
# The convolution test problem has singular values spread over several
# orders of magnitude. Noise that is invisible in the data gets blown up
# through the small singular values of the inverse.

import numpy as np

import abicreg as ar

design, exact = ar.phillips_problem(32)
print("condition of A:", f"{ar.condition_estimate(design.with_observations(np.zeros(32))):.3e}")

y, truth = ar.synthesize_observations(design, exact, sigma2=1e-6, seed=1)
problem = design.with_observations(y)

# ## Least squares

ls = ar.ls_estimate(problem)
print("LS error:       ", f"{np.linalg.norm(ls.beta_hat - exact):.3e}")

# ## Regularized least squares at a few strengths

for kappa in (1e-8, 1e-5, 1e-2, 1e1):
    reg = ar.regularized_estimate(problem, kappa=kappa)
    err = np.linalg.norm(reg.beta_hat - exact)
    print(f"kappa={kappa:8.0e}  error={err:.3e}")

# The sweet spot sits between fitting the noise (small kappa) and
# flattening the solution (large kappa).

# ## The Bayes estimate with an honest prior mean
#
# With the prior centered on the truth, even a strong prior helps
# instead of dragging the solution toward zero.

prior = ar.default_prior(32, mu=exact)
bayes = ar.bayes_estimate(problem, prior, sigma2=1e-6, sigma_beta2=1e-4)
print("Bayes error (mu = truth):", f"{np.linalg.norm(bayes.beta_hat - exact):.3e}")

zeroed = prior.with_zero_mean()
bayes0 = ar.bayes_estimate(problem, zeroed, sigma2=1e-6, sigma_beta2=1e-4)
print("Bayes error (mu = 0):    ", f"{np.linalg.norm(bayes0.beta_hat - exact):.3e}")

# At kappa = sigma2/sigma_beta2 the zero-mean Bayes estimate IS the
# regularized estimate:

reg = ar.regularized_estimate(problem, kappa=1e-6 / 1e-4)
print("collapse check:", np.allclose(bayes0.beta_hat, reg.beta_hat, rtol=1e-10))
