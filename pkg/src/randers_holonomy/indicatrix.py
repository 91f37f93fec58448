"""Indicatrix charts and restriction of fibre fields to circle fields.

Charts are parametrized by the polar angle ``t`` of the direction in the
tangent plane, so a chart point is ``y(t) = r(t) (cos t, sin t)`` with
``F(x, y(t)) = 1``. Since ``F`` is positively 1-homogeneous, ``r(t)`` is
simply ``1 / F(x, (cos t, sin t))``, and inverting the chart is ``atan2``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import dual
from .model import ModelKind, ModelVariant, check_point, finsler_c

DEFAULT_SAMPLES = 256
TANGENCY_TOL = 1e-7


class NotTangentError(ValueError):
    pass


def uniform_grid(n: int = DEFAULT_SAMPLES) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n) / n


@dataclass(frozen=True)
class IndicatrixChart:
    """Polar-angle parametrization of the indicatrix at ``x``."""

    model: ModelVariant
    x: np.ndarray
    point: Callable[[np.ndarray], np.ndarray]
    velocity: Callable[[np.ndarray], np.ndarray]

    def parameter(self, y) -> np.ndarray:
        """Chart parameter of (a positive multiple of) ``y``, in ``(-pi, pi]``."""
        y = np.asarray(y, dtype=float)
        return np.arctan2(y[1], y[0])


def origin_chart(m: ModelVariant) -> IndicatrixChart:
    """Closed-form chart at ``x = 0``.

    At the origin the Shen norm is ``|y| + epsilon a1 y1`` and the flat norm
    ``|y| + a1 y1``; both have indicatrix ``r (1 + a cos t) = 1`` with the
    corresponding ``a``. The Klein indicatrix at the origin is the unit circle.
    """
    if m.kind is ModelKind.KLEIN_RIEMANNIAN:
        a = 0.0
    elif m.kind is ModelKind.SHEN_RANDERS:
        a = m.epsilon * m.a1
    else:
        a = m.a1

    def point(t):
        t = np.asarray(t, dtype=float)
        d = 1.0 + a * np.cos(t)
        return np.array([np.cos(t) / d, np.sin(t) / d])

    def velocity(t):
        t = np.asarray(t, dtype=float)
        d2 = (1.0 + a * np.cos(t)) ** 2
        return np.array([-np.sin(t) / d2, (np.cos(t) + a) / d2])

    return IndicatrixChart(m, np.zeros(2), point, velocity)


def general_chart(m: ModelVariant, x) -> IndicatrixChart:
    """Chart at an arbitrary base point, ``r(t) = 1 / F(x, (cos t, sin t))``."""
    x = check_point(m, x)
    xs = (float(x[0]), float(x[1]))

    def radius_and_rate(t):
        t = np.asarray(t, dtype=float)
        u = (np.cos(t), np.sin(t))
        du = (-np.sin(t), np.cos(t))
        F, dF = dual.value_and_derivative(lambda ys: finsler_c(m, xs, ys), u, du)
        return 1.0 / F, -dF / F**2, u, du

    def point(t):
        r, _, u, _ = radius_and_rate(t)
        return np.array([r * u[0], r * u[1]])

    def velocity(t):
        r, dr, u, du = radius_and_rate(t)
        return np.array([dr * u[0] + r * du[0], dr * u[1] + r * du[1]])

    return IndicatrixChart(m, np.asarray(x, dtype=float), point, velocity)


def restrict_field(chart: IndicatrixChart, field, t=None, *, tol: float = TANGENCY_TOL):
    """Coefficient ``c(t)`` of a fibre field along the chart velocity.

    ``field`` is either a callable ``t -> (2, N)`` array or precomputed values
    on the grid ``t``. Solves ``field(t) = c(t) y'(t)`` by per-sample least
    squares and returns ``(c, residual)`` where ``residual`` is the largest
    norm of the orthogonal component. Raises :class:`NotTangentError` if the
    residual exceeds ``tol``.
    """
    if t is None:
        t = uniform_grid()
    t = np.asarray(t, dtype=float)
    values = np.asarray(field(t) if callable(field) else field, dtype=float)
    vel = chart.velocity(t)
    c = np.einsum("i...,i...->...", values, vel) / np.einsum("i...,i...->...", vel, vel)
    residual = float(np.max(np.linalg.norm(values - c * vel, axis=0)))
    if residual > tol:
        raise NotTangentError(f"field not tangent to indicatrix (residual {residual:.3e} > {tol:.1e})")
    return c, residual


def omega_closed_form(m: ModelVariant, t) -> np.ndarray:
    """Coefficient of the restricted curvature field at the origin, ``-(1 + a1 cos t)^2 / 4``.

    Only available for the Shen model with ``epsilon = +1``; for ``epsilon =
    -1`` use :func:`restrict_field` on the curvature field instead.
    """
    if m.kind is not ModelKind.SHEN_RANDERS:
        raise ValueError("closed-form omega is defined for the Shen Randers model only")
    if m.epsilon != 1:
        raise ValueError(
            "closed-form omega is only known for epsilon=+1; "
            "restrict the curvature field numerically for epsilon=-1"
        )
    t = np.asarray(t, dtype=float)
    return -0.25 * (1.0 + m.a1 * np.cos(t)) ** 2


def write_csv(path, t, y, c) -> None:
    """Dump ``(t, y1, y2, c)`` rows with a header."""
    y = np.asarray(y, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "y1", "y2", "c"])
        for row in zip(t, y[0], y[1], c):
            w.writerow([repr(float(v)) for v in row])
