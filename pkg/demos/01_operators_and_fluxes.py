"""Walk through the building blocks: LGL operators, the two-point flux and its dissipation."""

import numpy as np

from twolayer_dg.checks import random_states
from twolayer_dg.fluxes import dissipation_term, ec_flux_normal, verify_entropy_condition
from twolayer_dg.physics import PhysicsParams, entropy_variables, normal_flux
from twolayer_dg.sbp import operator_set

# --- nodes, weights and the derivative matrix for N = 4
ops = operator_set(4)
print("LGL nodes  ", np.round(ops.nodes, 6))
print("LGL weights", np.round(ops.weights, 6))

# SBP: Q = M D satisfies Q + Q^T = B = diag(-1, 0, ..., 0, 1)
print("max|Q + Q^T - B| =", np.abs(ops.sbp_q + ops.sbp_q.T - ops.boundary).max())

# D differentiates polynomials up to degree N exactly
x = ops.nodes
print("max|D x^4 - 4 x^3| =", np.abs(ops.deriv @ x**4 - 4 * x**3).max())

# --- the two-point flux
p = PhysicsParams(g=9.81, rho1=0.9, rho2=1.0)
rng = np.random.default_rng(0)
uL, uR = random_states(rng, 5), random_states(rng, 5)
bL, bR = rng.uniform(-1, 1, (2, 5))

# consistency: equal arguments give the physical flux
print("consistency:", np.abs(ec_flux_normal(uL, uL, p.g, 1.0, 0.0) - normal_flux(uL, p, 1.0, 0.0)).max())

# entropy condition, residual per pair (x direction)
print("entropy condition residuals:", verify_entropy_condition(uL, uR, bL, bR, p, 0))

# dissipation: [[w]] . (0.5 lambda H [[w]]) >= 0 for every pair
jump = entropy_variables(uR, bR, p) - entropy_variables(uL, bL, p)
diss = dissipation_term(uL, uR, bL, bR, p, 1.0, 0.0)
print("entropy removed per pair:", np.sum(jump * diss, axis=0))
