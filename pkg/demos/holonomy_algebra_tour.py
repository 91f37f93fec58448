"""
Growing the infinitesimal holonomy algebra
==========================================

Covariant derivatives of the curvature field and the brackets that make the
generated algebra grow.
"""

import numpy as np

from randers_holonomy import ModelVariant
from randers_holonomy import holonomy_algebra as ha
from randers_holonomy.covariant import iterated_restriction
from randers_holonomy.indicatrix import uniform_grid

m = ModelVariant.shen(0.5, +1)
t = uniform_grid(256)

# Restricted iterated Berwald derivatives, divided by the restricted field.
for idx in [(1,), (2,), (1, 1), (1, 2), (2, 1), (2, 2)]:
    r = iterated_restriction(m, idx, t)
    print(f"nabla{idx}: ratio at t = 0, pi/2, pi ->", np.round(r.ratio[[0, 64, 128]], 6))

# The two mixed derivatives coincide: their commutator acts as a bracket with
# the curvature field itself, which vanishes.

# %%
# Sigma_n, the span of sin^l t cos^m t multiples with l + m <= n, has
# dimension 2n + 1 because sin^2 + cos^2 = 1 collapses the rest.
omega = ha.xi0(m)
print("omega coefficients a =", omega.a)
print("rank of Sigma_n, n = 0..10:", [ha.sigma_basis(m, n, omega=omega).rank for n in range(11)])

# Bracketing with omega raises the trigonometric degree by one.
lhs, rhs = ha.bracket_cos_identity(0.5, 5, omega)
print("bracket recursion residual:", ha.coefficient_error(lhs, rhs))

# %%
# Starting from omega and its first derivatives, repeated brackets keep adding
# new directions.
seeds = [omega] + [ha.project(iterated_restriction(m, (j,), t).coeff, 8) for j in (1, 2)]
gen = ha.generate_algebra(seeds, max_rounds=6, order=64)
print("rank after each round:", gen.history, "(pairs beyond capacity:", gen.skipped, ")")

# The Fourier modes sin nt d/dt sit in the closure of the multiples of omega:
# sin(nt)/omega is approximated by Fejer means, slowly.
curve = ha.fejer_membership(lambda s: np.sin(3 * s) / omega(s), 64)
for n in (4, 16, 64):
    print(f"Fejer order {n:2d}: sup error {curve.errors[n - 1]:.4f}")
print("plain partial sum at order 64:", ha.partial_sum_errors(lambda s: np.sin(3 * s) / omega(s), 64)[-1])
