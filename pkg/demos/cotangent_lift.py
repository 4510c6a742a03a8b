"""
Curvature of a cotangent lift
=============================

With the pbar-degree filter the curvature series stops after its first term,
a single hbar/48 contraction.  Both routes are computed and compared.
"""

import random

from kontsevich_weights.jets import random_jet
from kontsevich_weights.series import (BivectorJets, CotangentSplit, RJets, cotangent_curvature,
                                       curvature_F, enforce_cotangent_filter)

rng = random.Random(0)
split = CotangentSplit(2)
R = RJets.from_matrix([[random_jet(rng, 2, 2, 4, density=0.3) for _ in range(2)] for _ in range(2)])
print("before filter:", R[0, 0])
R = enforce_cotangent_filter(R, split)
print("after filter: ", R[0, 0])

pi = BivectorJets.darboux(2)
F = cotangent_curvature(R, pi, split)
print("F_12 =", F.render()["dx^1∧dx^2"])

# the full series for comparison; higher orders are zero
full = curvature_F(R, pi, 4)
print("full series vanishes at", full.vanishing_orders())
