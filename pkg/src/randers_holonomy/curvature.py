"""Curvature of the spray: curvature tensor, Ricci scalar, flag curvature.

The curvature tensor is assembled from the connection,

    R^i_jk = d_k G^i_j - d_j G^i_k + G^m_j G^i_km - G^m_k G^i_jm,

with the x-derivatives taken by dual numbers, so constancy of the flag
curvature is a genuine check rather than an input.

Index convention for the Riemann curvature: the flagpole sits in the first
lower slot, ``R_y(u)^i = R^i_jk y^j u^k``. With this choice a metric of
constant flag curvature ``lam`` has ``R_y(u) = lam (F^2 u - g_y(y, u) y)``,
``K = lam`` and ``Ric = (n - 1) lam F^2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dual import partial
from .model import (
    ModelVariant,
    _prepare,
    check_vector,
    fundamental_tensor,
    nonlinear_connection_c,
    spray_c,
)


class DegenerateFlagError(ValueError):
    pass


@dataclass
class CurvatureData:
    """``Rijk`` (2, 2, 2, ...) indexed ``[i, j, k]``, ``Rij`` (2, 2, ...), ``ric``."""

    Rijk: np.ndarray
    Rij: np.ndarray
    ric: np.ndarray


def curvature_tensor_c(m: ModelVariant, x, y):
    """Nested ``R[i][j][k]`` on scalar components (dual-number friendly)."""
    x = tuple(x)
    y = tuple(y)
    _, Gj, Gjk, _ = spray_c(m, x, y)
    dGj = [partial(lambda xs: nonlinear_connection_c(m, xs, y), x, k) for k in range(2)]  # [k][i][j]
    R = [[[None] * 2 for _ in range(2)] for _ in range(2)]
    for i in range(2):
        for j in range(2):
            for k in range(2):
                quad_a = Gj[0][j] * Gjk[i][k][0] + Gj[1][j] * Gjk[i][k][1]
                quad_b = Gj[0][k] * Gjk[i][j][0] + Gj[1][k] * Gjk[i][j][1]
                R[i][j][k] = (dGj[k][i][j] - dGj[j][i][k]) + (quad_a - quad_b)
    return R


def curvature_field_c(m: ModelVariant, x, y):
    """``R(d/dx1, d/dx2)`` as a fibre vector ``[xi^1, xi^2]``."""
    x = tuple(x)
    y = tuple(y)
    _, Gj, Gjk, _ = spray_c(m, x, y)
    dG0 = partial(lambda xs: [row[0] for row in nonlinear_connection_c(m, xs, y)], x, 1)
    dG1 = partial(lambda xs: [row[1] for row in nonlinear_connection_c(m, xs, y)], x, 0)
    out = []
    for i in range(2):
        quad_a = Gj[0][0] * Gjk[i][1][0] + Gj[1][0] * Gjk[i][1][1]
        quad_b = Gj[0][1] * Gjk[i][0][0] + Gj[1][1] * Gjk[i][0][1]
        out.append((dG0[i] - dG1[i]) + (quad_a - quad_b))
    return out


def _full(tree, like):
    z = 0.0 * like
    if isinstance(tree, list):
        return [_full(t, like) for t in tree]
    return tree + z


def _batched(v, shape):
    v = np.asarray(v, dtype=float)
    if v.ndim == 1:
        v = v.reshape((2,) + (1,) * len(shape))
    return np.broadcast_to(v, (2,) + shape)


def curvature_tensor(m: ModelVariant, x, y) -> CurvatureData:
    """Curvature tensor, Riemann curvature ``R^i_k = R^i_jk y^j`` and Ricci scalar."""
    xs, ys = _prepare(m, x, y)
    Rijk = np.asarray(_full(curvature_tensor_c(m, xs, ys), ys[0]), dtype=float)
    yv = np.asarray(ys)
    Rij = np.einsum("ijk...,j...->ik...", Rijk, yv)
    ric = Rij[0, 0] + Rij[1, 1]
    return CurvatureData(Rijk=Rijk, Rij=Rij, ric=ric)


def ricci(m: ModelVariant, x, y) -> np.ndarray:
    return curvature_tensor(m, x, y).ric


def riemann_curvature(m: ModelVariant, x, y, u) -> np.ndarray:
    """``R_y(u)`` with the flagpole ``y`` in the first lower slot."""
    u = check_vector(u)
    data = curvature_tensor(m, x, y)
    return np.einsum("ik...,k...->i...", data.Rij, np.broadcast_to(u, data.Rij.shape[1:]))


def flag_curvature(m: ModelVariant, x, y, u, *, min_denominator: float = 1e-12) -> np.ndarray:
    """Flag curvature ``K(span{y, u}, y)``.

    Raises :class:`DegenerateFlagError` when ``y`` and ``u`` are (numerically)
    parallel, i.e. when the Gram determinant falls below ``min_denominator``
    times ``g(y, y) g(u, u)``.
    """
    u = np.asarray(check_vector(u), dtype=float)
    y = np.asarray(y, dtype=float)
    g = fundamental_tensor(m, x, y)
    y_b, u_b = np.broadcast_arrays(y, u)
    gyy = np.einsum("ij...,i...,j...->...", g, y_b, y_b)
    guu = np.einsum("ij...,i...,j...->...", g, u_b, u_b)
    gyu = np.einsum("ij...,i...,j...->...", g, y_b, u_b)
    denom = gyy * guu - gyu**2
    if np.any(np.abs(denom) < min_denominator * gyy * guu):
        raise DegenerateFlagError("flag is degenerate: y and u are parallel")
    Ru = riemann_curvature(m, x, y, u_b)
    return np.einsum("ij...,i...,j...->...", g, Ru, u_b) / denom


def curvature_vector(m: ModelVariant, x, y, X, Y) -> np.ndarray:
    """``xi^i = R^i_jk X^j Y^k``, the curvature vector field ``R(X, Y)`` at ``(x, y)``."""
    data = curvature_tensor(m, x, y)
    shape = data.Rijk.shape[3:]
    X, Y = (_batched(v, shape) for v in (X, Y))
    return np.einsum("ijk...,j...,k...->i...", data.Rijk, X, Y)
