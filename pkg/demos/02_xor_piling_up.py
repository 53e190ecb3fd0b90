"""Why XORing many biased units works, in closed form.

For independent bits with P(1) = mu_i the parity is 1 with probability
(1 - prod(1 - 2 mu_i)) / 2, so every extra unit shrinks the bias
geometrically. The Monte-Carlo column checks the formula.
"""

import numpy as np

from dhtrng.analytic import (CoverageParams, randomness_coverage, xor_monte_carlo,
                             xor_n_expectation, xor_n_expectation_printed)

mu = 0.69  # a hybrid unit whose RO2 sits in the hold loop most of the time

print(" n   exact P(1)      bias %     monte carlo")
for n in (1, 2, 4, 9, 18):
    p = xor_n_expectation([mu] * n)
    est, se = xor_monte_carlo([mu] * n, 1_000_000, np.random.default_rng(n))
    print(f"{n:2d}   {p:.10f}   {abs(2 * p - 1) * 100:9.2e}   {est:.4f} +- {se:.4f}")

# the printed two-unit form returns the complement of the exact parity
print("two units, exact vs printed form:", xor_n_expectation([0.6, 0.7]),
      xor_n_expectation_printed(0.6, 0.7, 2))

# coverage of jitter plus hold-region sampling as units are added
for n in (1, 4, 8):
    c = CoverageParams(n=n, a=0.5, w=[1e-11] * n, T_ro=[1e-9] * n, tau=0.1,
                       epsilon=1e-11, f=[5e8] * n)
    print(f"coverage with {n} units: {randomness_coverage(c):.4f}")
