"""
Star product, connection and curvature on jets
==============================================

Everything is exact: coefficients are fractions, and each jet remembers up to
which degrees in dx and y it is known.
"""

import random
from pathlib import Path

from kontsevich_weights.jetfile import load
from kontsevich_weights.jets import parse_base, parse_jet
from kontsevich_weights.series import (BivectorJets, apply_classical_DG, bullet_product, compute_R,
                                       connection_A, curvature_F, flatness_residual, pullback_bivector,
                                       pullback_function, random_bivector, random_exp_map, star_product)

# the simplest case: a constant bivector on flat fibers
pi = BivectorJets.darboux(2)
print(star_product(pi, parse_jet("y1", 2), parse_jet("y2", 2)).render())

# a curved exponential map from a jet file
jf = load(Path(__file__).parent / "jets" / "quadratic2.json")
R = compute_R(jf.phi)
print("R^1_1 to low order:", R[0, 0].truncate(1, 2))

# R is flat and Taylor pullbacks are D_G-closed
res = flatness_residual(R)
print("flat:", all(j.is_zero() for vec in res.values() for j in vec))
f = parse_base("x1^2 + x2", 2)
print("D_G(Tphi* f) = 0:", apply_classical_DG(jf.phi, pullback_function(jf.phi, f)).is_zero())

# only even orders in the connection, only odd ones in the curvature
rng = random.Random(3)
phi = random_exp_map(rng, 2, 2, 6)
pi_hat = pullback_bivector(phi, random_bivector(rng, 2))
sigma = parse_jet("y1*y2 + y1^3*y2^2", 2)
print("A vanishes at orders", connection_A(compute_R(phi), pi_hat, sigma).vanishing_orders())
print("F vanishes at orders", curvature_F(compute_R(phi), pi_hat).vanishing_orders())

# the global product, read off at y = 0
print([str(c) for c in bullet_product(jf.phi, jf.pi, f, parse_base("x1*x2", 2), 2)])
