"""
Curvature of the Shen disk
==========================

Walks from the norm to the curvature field restricted to the indicatrix at
the origin. Run with ``python3 demos/curvature_tour.py``.
"""

import numpy as np

from randers_holonomy import ModelVariant, curvature_vector, finsler, flag_curvature, fundamental_tensor
from randers_holonomy.indicatrix import omega_closed_form, origin_chart, restrict_field, uniform_grid

np.set_printoptions(precision=6, suppress=True)

# The Randers norm is not reversible: F(x, -y) differs from F(x, y).
shen = ModelVariant.shen(0.5, +1)
x = np.array([0.3, -0.2])
y = np.array([1.0, 0.4])
print("F(x, y)  =", float(finsler(shen, x, y)))
print("F(x, -y) =", float(finsler(shen, x, -y)))
print("g_ij(x, y) =\n", fundamental_tensor(shen, x, y))

# Flag curvature is the same for every point and flag.
rng = np.random.default_rng(0)
pts = 0.9 * rng.uniform(-0.7, 0.7, size=(2, 1000))
ys, us = rng.normal(size=(2, 1000)), rng.normal(size=(2, 1000))
K = flag_curvature(shen, pts, ys, us)
print(f"Shen flag curvature: min {K.min():.12f}, max {K.max():.12f}")

# The Klein metric of the same disk is Riemannian with curvature -1.
K_klein = flag_curvature(ModelVariant.klein(), pts, ys, us)
print(f"Klein flag curvature: min {K_klein.min():.12f}, max {K_klein.max():.12f}")

# %%
# The curvature vector field R(d/dx1, d/dx2) at the origin is tangent to the
# indicatrix, so it restricts to a function times d/dt on the circle.
chart = origin_chart(shen)
t = uniform_grid(8)
y_t = chart.point(t)
xi = curvature_vector(shen, [0.0, 0.0], y_t, [1.0, 0.0], [0.0, 1.0])
c, residual = restrict_field(chart, xi, t)
print("t           :", t)
print("c(t)        :", c)
print("-(1+a cos)^2/4:", omega_closed_form(shen, t))
print("normal residual:", residual)

# For epsilon = -1 the profile flips the sign of the a1 term.
mirror = ModelVariant.shen(0.5, -1)
chart_m = origin_chart(mirror)
c_m, _ = restrict_field(chart_m, curvature_vector(mirror, [0.0, 0.0], chart_m.point(t), [1, 0], [0, 1]), t)
print("epsilon = -1:", c_m)
