"""Horizontal Berwald covariant derivatives of fibre vector fields.

A fibre field ``xi(x, y) = xi^i(x, y) d/dy^i`` is represented by an evaluator
on scalar components; derivatives are new evaluators closing over the old
one, with all partial derivatives taken by nested dual numbers:

    (nabla_j xi)^i = d xi^i/dx^j - G^k_j d xi^i/dy^k + G^i_jk xi^k.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .curvature import curvature_field_c
from .dual import partial
from .indicatrix import origin_chart, restrict_field, uniform_grid
from .model import ModelKind, ModelVariant, _prepare, spray_c

MAX_DEPTH = 4


@dataclass(frozen=True)
class FiberField:
    """Smooth fibre vector field ``(x, y) -> [xi^1, xi^2]``.

    ``degree`` records the homogeneity in ``y``; ``label`` is for reports.
    """

    fn: Callable
    degree: int = 1
    label: str = "xi"

    def __call__(self, x, y):
        return self.fn(tuple(x), tuple(y))

    def evaluate(self, m: ModelVariant, x, y) -> np.ndarray:
        xs, ys = _prepare(m, x, y)
        z = 0.0 * ys[0]
        return np.array([v + z for v in self(xs, ys)], dtype=float)


def curvature_field(m: ModelVariant) -> FiberField:
    """``R(d/dx1, d/dx2)`` as a fibre field."""
    return FiberField(lambda x, y: curvature_field_c(m, x, y), degree=1, label="xi")


def berwald_derivative(m: ModelVariant, field: FiberField, j: int) -> FiberField:
    """``nabla_{d/dx^j} field`` for ``j`` in ``{1, 2}``."""
    if j not in (1, 2):
        raise ValueError(f"direction index must be 1 or 2, got {j}")
    jj = j - 1

    def fn(x, y):
        _, Gj, Gjk, _ = spray_c(m, x, y)
        xi = field(x, y)
        dx = partial(lambda xs: field(xs, y), x, jj)
        dy = [partial(lambda ys: field(x, ys), y, k) for k in range(2)]
        out = []
        for i in range(2):
            v = dx[i] - (Gj[0][jj] * dy[0][i] + Gj[1][jj] * dy[1][i])
            v = v + (Gjk[i][jj][0] * xi[0] + Gjk[i][jj][1] * xi[1])
            out.append(v)
        return out

    return FiberField(fn, degree=field.degree, label=f"nabla_{j} {field.label}")


def iterated_derivative(m: ModelVariant, field: FiberField, idx: Sequence[int], *, outer_first: bool = True):
    """``nabla_{i1} ... nabla_{ik} field``.

    With ``outer_first`` (the default) the leftmost index is applied last, so
    ``idx=(1, 2)`` is ``nabla_1(nabla_2 field)``.
    """
    idx = tuple(idx)
    if len(idx) > MAX_DEPTH:
        raise ValueError(f"derivative depth {len(idx)} exceeds the cap of {MAX_DEPTH}")
    order = reversed(idx) if outer_first else iter(idx)
    for j in order:
        field = berwald_derivative(m, field, j)
    return field


@dataclass
class Restriction:
    """Restriction of an iterated derivative of the curvature field at ``x = 0``."""

    idx: tuple
    t: np.ndarray
    coeff: np.ndarray
    ratio: np.ndarray
    residual: float


def iterated_restriction(
    m: ModelVariant,
    idx: Sequence[int],
    t=None,
    *,
    outer_first: bool = True,
) -> Restriction:
    """Restrict ``nabla_idx R(d/dx1, d/dx2)`` to the indicatrix at the origin.

    Returns the coefficient ``c(t)`` along ``d/dt`` and the ratio ``c / omega``
    with ``omega`` the restricted curvature field itself.
    """
    if m.kind is not ModelKind.SHEN_RANDERS:
        raise ValueError("iterated restrictions are defined for the Shen Randers model")
    if t is None:
        t = uniform_grid()
    t = np.asarray(t, dtype=float)
    chart = origin_chart(m)
    y = chart.point(t)
    x = np.zeros_like(y)
    base = curvature_field(m)
    omega, _ = restrict_field(chart, base.evaluate(m, x, y), t)
    field = iterated_derivative(m, base, idx, outer_first=outer_first)
    values = field.evaluate(m, x, y)
    scale = max(1.0, float(np.max(np.abs(values))))
    coeff, residual = restrict_field(chart, values, t, tol=1e-7 * scale)
    return Restriction(tuple(idx), t, coeff, coeff / omega, residual)


def write_csv(path, restriction: Restriction) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "c", "c_over_omega"])
        for row in zip(restriction.t, restriction.coeff, restriction.ratio):
            w.writerow([repr(float(v)) for v in row])
