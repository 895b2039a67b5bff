"""
Two-weight rate sweep: exact distance vs structural factor
===========================================================

Two different summand laws with factorial moments matched through order
three are summed in two weighted blocks.  The exact Kolmogorov distance
between the two weighted sums shrinks roughly like 1/n while the
structural bound factor only promises n^(-1/2); their ratio tracks how
much of the bound is slack on this grid.
"""

from wsumdist import (
    EXAMPLE_F,
    EXAMPLE_G,
    factorial_moment,
    fit_rate,
    run_example,
    smoothness_u,
    tv_norm,
)

# The two laws share nu_1 = 1, nu_2 = 1.5, nu_3 = 3 but differ as
# distributions: their total variation distance is 0.75.
for k in (1, 2, 3):
    print(
        f"nu_{k}:  F {factorial_moment(EXAMPLE_F, k):.6g}"
        f"   G {factorial_moment(EXAMPLE_G, k):.6g}"
    )
print(f"tv(F - G) = {tv_norm(EXAMPLE_F - EXAMPLE_G):.6g}")
print(f"smoothness u(F) = {smoothness_u(EXAMPLE_F):.6g}")
print()

# Sweep n over a geometric grid.  Each n is split into a small block of
# ceil(sqrt(n)) summands with weight 1 and a large block of n summands
# with weight sqrt(2); S uses F everywhere, Z uses G.
result = run_example((16, 64, 256, 1024))
print(result.to_text())

# The distance alone decays like n^(-1.28) on this grid, faster than the
# factor's n^(-1/2); the pre-asymptotic drift is why the ratio column
# moves.  On much larger n the fitted slope settles near -1.
fit = fit_rate(zip((16, 64, 256, 1024), result.column("distance")))
print(f"distance-only slope: {fit.slope:.4f} (residual {fit.residual:.3f})")
