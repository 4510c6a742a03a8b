"""Exact and numerical Kontsevich weights for three graph families, and the
formal-geometry series operators that consume them.

Submodules:

* :mod:`.exact` - closed forms and brute-force binomial routes (rational arithmetic);
* :mod:`.geometry` - angle propagator, sign factors, gauge-fixed configurations;
* :mod:`.integrate` - Gauss-Legendre and Monte Carlo estimates;
* :mod:`.jets`, :mod:`.series` - truncated jets, star product, connection, curvature;
* :mod:`.jetfile` - the JSON jet file format;
* :mod:`.cli` - the ``kontsevich-weights`` command.
"""

from .errors import *  # noqa: F401,F403
from .exact import (Family, Method, PiMonomial, WeightQuery, WeightResult, binomial_sum,
                    binomial_sum_literal, eval_boundary_moment, eval_wheel_moment, hyp2f1_terminating,
                    pochhammer, weight, weight_gamma, weight_gamma_bruteforce, weight_lambda,
                    weight_upsilon)
from .geometry import (GaugeFixedConfig, angle, angle_gradient, edge_jacobian, edge_list,
                       indicator_boundary, sign_bulk, wedge_factor_boundary, wedge_factor_bulk)
from .integrate import (McEstimate, SamplerSpec, convergence_report, full_mc, reduced_gamma_mc,
                        reduced_upsilon_quad)
from .jets import BasePolynomial, JetPolynomial, parse_base, parse_jet, series_matrix_inverse
from .series import (BivectorJets, CotangentSplit, ExpMapJets, HbarForm, RJets, apply_classical_DG,
                     bullet_product, compute_R, connection_A, cotangent_curvature, curvature_F,
                     enforce_cotangent_filter, flatness_residual, gamma_equation_residual,
                     parity_report, pullback_bivector, pullback_function, star_commutator,
                     star_product)

__version__ = "0.1.0"
