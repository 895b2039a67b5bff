"""
Negative binomial matching for overdispersed block sums
=======================================================

A block of n iid counts with variance above its mean admits a negative
binomial law with exactly the same mean and variance.  The matched pmf
is built by series truncation with an explicit error budget, so moment
errors stay at the 1e-10 scale even for thousands of summands.
"""

from wsumdist import (
    EXAMPLE_F,
    moments,
    nb_component_pmf,
    nb_match,
    power,
    run_nb,
)

# One summand has mean 1 and variance 1.5; ten of them give (10, 15).
summary = moments(EXAMPLE_F)
print(f"summand mean {summary.mean:.6g}, variance {summary.variance:.6g}")

# Matching mean 10 / variance 15 fixes r = mean^2/(var - mean) = 20 and
# p~ = mean/var = 2/3.
params = nb_match(10.0, 15.0)
print(f"matched r = {params.r:.6g}, p~ = {params.p_tilde:.6g}")

# The full law can also be assembled from n identical fractional-shape
# components, one per summand; convolving them back recovers the target
# moments to the truncation budget.
component = nb_component_pmf(params, 10, 1e-13)
total = power(component, 10)
s = moments(total)
print(f"rebuilt mean {s.mean!r}, variance {s.variance!r}")
print(f"component error budget {component.error_budget:.3e}")
print()

# Across a grid of block counts with the per-summand law fixed, the
# structural factor decays exactly like n^(-1/2).
result = run_nb((25, 100, 400, 1600))
print(result.to_text())
