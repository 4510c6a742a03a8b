"""
Numerical checks of the weights
===============================

Monte Carlo over the gauge-fixed configuration spaces and Gauss-Legendre
quadrature of the one-boundary integrand.
"""

import numpy as np

from kontsevich_weights import WeightQuery, convergence_report, full_mc, reduced_gamma_mc, reduced_upsilon_quad
from kontsevich_weights.integrate import exact_value

# the error shrinks like 1/sqrt(samples)
rows = convergence_report(WeightQuery("gamma", 1), [10_000, 100_000, 1_000_000], seed=1, chunks=8)
for r in rows:
    print(f"{r['samples']:>9d}  {r['estimate']:.6f} ± {r['std_error']:.1e}   z = {r['z']:+.2f}")

# integrating out the wedge vertices first gives a smaller variance
q = WeightQuery("gamma", 3)
est = reduced_gamma_mc(3, 400_000, seed=5)
print("reduced gamma_3:", est.mean, "±", est.std_error, " exact", exact_value(q))

est = full_mc(WeightQuery("lambda", 2), 200_000, seed=2)
print("lambda_2:", est.mean, "±", est.std_error)

# quadrature converges fast once the integrand is split at its kink
for n in (0, 2, 4, 6):
    errs = [abs(reduced_upsilon_quad(n, p) - exact_value(WeightQuery("upsilon", n))) for p in (4, 16, 64)]
    print(n, np.array(errs))
