"""Metric variants on the unit disk and their connection data.

Three projectively flat Finsler metrics are supported:

* ``ShenRanders`` -- Shen's standard model of a projectively flat Randers
  metric of constant flag curvature -1/4, with ``a = (a1, 0)``.
* ``KleinRiemannian`` -- the Riemannian part of the same expression (the
  Hilbert-Klein metric of the disk).
* ``FlatMinkowski`` -- the constant Minkowski-Randers norm ``|y| + a1*y1``.

Everything below the public wrappers is written against scalar components so
that the same code evaluates on numpy batches as well as on nested
:class:`~randers_holonomy.dual.Dual` numbers. Batched inputs carry the sample
axis last: ``x`` has shape ``(2,)`` or ``(2, N)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import dual
from .dual import partial

#: distance from the unit circle below which disk variants refuse to evaluate
DOMAIN_GUARD = 1e-6


class DomainError(ValueError):
    """Input outside the region where a metric is defined."""


class NotPositiveDefiniteError(ArithmeticError):
    pass


class ModelKind(str, enum.Enum):
    SHEN_RANDERS = "shen"
    KLEIN_RIEMANNIAN = "klein"
    FLAT_MINKOWSKI = "flat"


@dataclass(frozen=True)
class ModelVariant:
    """Which metric is loaded, together with its constants.

    ``a1`` is used by the Shen and flat variants, ``epsilon`` only by Shen.
    """

    kind: ModelKind
    a1: float = 0.0
    epsilon: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if not abs(self.a1) < 1.0:
            raise ValueError(f"|a1| must be < 1, got a1={self.a1}")
        if self.epsilon not in (1, -1):
            raise ValueError(f"epsilon must be +1 or -1, got {self.epsilon}")

    @classmethod
    def shen(cls, a1: float, epsilon: int = 1) -> "ModelVariant":
        return cls(ModelKind.SHEN_RANDERS, float(a1), int(epsilon))

    @classmethod
    def klein(cls) -> "ModelVariant":
        return cls(ModelKind.KLEIN_RIEMANNIAN)

    @classmethod
    def flat(cls, a1: float = 0.0) -> "ModelVariant":
        return cls(ModelKind.FLAT_MINKOWSKI, float(a1))

    @property
    def on_disk(self) -> bool:
        return self.kind is not ModelKind.FLAT_MINKOWSKI

    @property
    def is_riemannian(self) -> bool:
        return self.kind is ModelKind.KLEIN_RIEMANNIAN or (
            self.kind is ModelKind.FLAT_MINKOWSKI and self.a1 == 0.0
        )

    def label(self) -> str:
        if self.kind is ModelKind.SHEN_RANDERS:
            return f"shen(a1={self.a1:g}, eps={self.epsilon:+d})"
        if self.kind is ModelKind.FLAT_MINKOWSKI:
            return f"flat(a1={self.a1:g})"
        return "klein"


@dataclass
class SprayData:
    """Spray coefficients and their fibre derivatives at a batch of points.

    Shapes: ``G`` (2, ...), ``Gj`` (2, 2, ...) indexed ``[i, j]``, ``Gjk``
    (2, 2, 2, ...) indexed ``[i, j, k]``. ``P`` is ``None`` when the data
    came from the generic (non-projective) route.
    """

    G: np.ndarray
    Gj: np.ndarray
    Gjk: np.ndarray
    P: np.ndarray | None = None


# ---------------------------------------------------------------------------
# component-level formulas (dual-number friendly, no validation)


def _randers_parts(x, y):
    xx = x[0] * x[0] + x[1] * x[1]
    yy = y[0] * y[0] + y[1] * y[1]
    xy = x[0] * y[0] + x[1] * y[1]
    root = dual.sqrt(yy - (xx * yy - xy * xy))
    return root, xy, 1.0 - xx


def finsler_c(m: ModelVariant, x, y):
    if m.kind is ModelKind.FLAT_MINKOWSKI:
        return dual.sqrt(y[0] * y[0] + y[1] * y[1]) + m.a1 * y[0]
    root, xy, d = _randers_parts(x, y)
    if m.kind is ModelKind.KLEIN_RIEMANNIAN:
        return root / d
    return root / d + m.epsilon * (xy / d + m.a1 * y[0] / (1.0 + m.a1 * x[0]))


def projective_factor_c(m: ModelVariant, x, y):
    if m.kind is ModelKind.FLAT_MINKOWSKI:
        return 0.0 * y[0]
    root, xy, d = _randers_parts(x, y)
    if m.kind is ModelKind.KLEIN_RIEMANNIAN:
        return xy / d
    return 0.5 * ((m.epsilon * root + xy) / d - m.a1 * y[0] / (1.0 + m.a1 * x[0]))


def projective_factor_generic_c(m: ModelVariant, x, y):
    """``(dF/dx^i) y^i / (2F)``, the projective factor of any projectively flat metric."""
    F, dF = dual.value_and_derivative(lambda xs: finsler_c(m, xs, y), tuple(x), tuple(y))
    return dF / (2.0 * F)


def _p_jet(m: ModelVariant, x, y, order: int):
    """``P``, its y-gradient and (if ``order`` is 2) its y-Hessian."""
    P = projective_factor_c(m, x, y)
    if m.kind is ModelKind.FLAT_MINKOWSKI:
        zero = 0.0 * y[0]
        return P, [zero, zero], [[zero, zero], [zero, zero]]

    def dP(ys, k):
        return partial(lambda zs: projective_factor_c(m, x, zs), ys, k)

    grad = [dP(tuple(y), k) for k in range(2)]
    if order < 2:
        return P, grad, None
    hess = [[partial(lambda ys: dP(ys, l), tuple(y), k) for l in range(2)] for k in range(2)]
    return P, grad, hess


def nonlinear_connection_c(m: ModelVariant, x, y):
    """``G^i_j = P_j y^i + P delta^i_j`` as a nested 2x2 list."""
    P, dP, _ = _p_jet(m, x, y, 1)
    return [[dP[j] * y[i] + (P if i == j else 0.0) for j in range(2)] for i in range(2)]


def spray_c(m: ModelVariant, x, y):
    """``(G, Gj, Gjk, P)`` as nested lists from the projective closed forms."""
    P, dP, ddP = _p_jet(m, x, y, 2)
    G = [P * y[i] for i in range(2)]
    Gj = [[dP[j] * y[i] + (P if i == j else 0.0) for j in range(2)] for i in range(2)]
    Gjk = [
        [
            [
                ddP[j][k] * y[i] + (dP[j] if i == k else 0.0) + (dP[k] if i == j else 0.0)
                for k in range(2)
            ]
            for j in range(2)
        ]
        for i in range(2)
    ]
    return G, Gj, Gjk, P


def metric_c(m: ModelVariant, x, y):
    """``g_ij = 1/2 d^2 F^2 / dy^i dy^j`` as a nested 2x2 list."""

    def half_f2(ys):
        F = finsler_c(m, x, ys)
        return 0.5 * F * F

    def d_half_f2(ys, j):
        return partial(half_f2, ys, j)

    g01 = partial(lambda ys: d_half_f2(ys, 1), tuple(y), 0)
    return [
        [partial(lambda ys: d_half_f2(ys, 0), tuple(y), 0), g01],
        [g01, partial(lambda ys: d_half_f2(ys, 1), tuple(y), 1)],
    ]


def _inv2(g):
    det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
    return [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]], det


def spray_generic_G_c(m: ModelVariant, x, y):
    """``G^i = 1/4 g^il (2 d_k g_jl - d_l g_jk) y^j y^k`` from the metric alone."""
    g = metric_c(m, x, y)
    dg = [partial(lambda xs: metric_c(m, xs, y), tuple(x), k) for k in range(2)]  # dg[k][j][l]
    ginv, det = _inv2(g)
    if np.any(dual.primal(det) <= 0.0):
        raise NotPositiveDefiniteError("singular fundamental tensor in generic spray")
    rhs = []
    for l in range(2):
        s = 0.0
        for j in range(2):
            for k in range(2):
                s = s + (2.0 * dg[k][j][l] - dg[l][j][k]) * y[j] * y[k]
        rhs.append(s)
    return [0.25 * (ginv[i][0] * rhs[0] + ginv[i][1] * rhs[1]) for i in range(2)]




# ---------------------------------------------------------------------------
# validation and public array API


def _as_pair(v, name):
    arr = np.asarray(v, dtype=float)
    if arr.shape[:1] != (2,):
        raise ValueError(f"{name} must have leading dimension 2, got shape {arr.shape}")
    return arr


def check_point(m: ModelVariant, x) -> np.ndarray:
    x = _as_pair(x, "x")
    if m.on_disk:
        r = np.sqrt(x[0] ** 2 + x[1] ** 2)
        if np.any(r > 1.0 - DOMAIN_GUARD):
            raise DomainError(
                f"point outside the disk guard |x| <= 1 - {DOMAIN_GUARD:g} (max |x| = {np.max(r):.9g})"
            )
    return x


def check_vector(y) -> np.ndarray:
    y = _as_pair(y, "y")
    if np.any((y[0] == 0.0) & (y[1] == 0.0)):
        raise ValueError("tangent vector must be nonzero")
    return y


def _prepare(m, x, y):
    x = check_point(m, x)
    y = check_vector(y)
    # a single point or vector pairs with every sample of a batch
    nd = max(x.ndim, y.ndim)
    x = x.reshape(x.shape + (1,) * (nd - x.ndim))
    y = y.reshape(y.shape + (1,) * (nd - y.ndim))
    x, y = np.broadcast_arrays(x, y)
    return (x[0], x[1]), (y[0], y[1])


def finsler(m: ModelVariant, x, y) -> np.ndarray:
    """Finsler norm ``F(x, y)``."""
    xs, ys = _prepare(m, x, y)
    return np.asarray(finsler_c(m, xs, ys))


def fundamental_tensor(m: ModelVariant, x, y) -> np.ndarray:
    """Fundamental tensor ``g_ij(x, y)``, shape ``(2, 2, ...)``.

    Raises :class:`NotPositiveDefiniteError` if the Hessian of ``F^2/2`` is not
    positive definite at some sample, which happens only for ``|a1| >= 1`` or a
    broken metric expression.
    """
    xs, ys = _prepare(m, x, y)
    g = np.asarray(metric_c(m, xs, ys), dtype=float)
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    if np.any(g[0, 0] <= 0.0) or np.any(det <= 0.0):
        raise NotPositiveDefiniteError("fundamental tensor is not positive definite")
    return g


def projective_factor(m: ModelVariant, x, y) -> np.ndarray:
    """Closed-form projective factor ``P(x, y)``."""
    xs, ys = _prepare(m, x, y)
    return np.asarray(projective_factor_c(m, xs, ys) + 0.0 * ys[0])


def projective_factor_generic(m: ModelVariant, x, y) -> np.ndarray:
    """Projective factor from ``F`` alone, via ``(dF/dx . y) / 2F``."""
    xs, ys = _prepare(m, x, y)
    return np.asarray(projective_factor_generic_c(m, xs, ys) + 0.0 * ys[0])


def _stack(tree):
    return np.asarray(tree, dtype=float)


def spray(m: ModelVariant, x, y) -> SprayData:
    """Spray data from the projective closed forms."""
    xs, ys = _prepare(m, x, y)
    G, Gj, Gjk, P = spray_c(m, xs, ys)
    z = 0.0 * ys[0]
    return SprayData(
        G=_stack([g + z for g in G]),
        Gj=_stack([[g + z for g in row] for row in Gj]),
        Gjk=_stack([[[g + z for g in r] for r in row] for row in Gjk]),
        P=np.asarray(P + z),
    )


def spray_generic(m: ModelVariant, x, y) -> SprayData:
    """Spray data from the metric route, for cross-validation.

    ``G`` comes from the fundamental tensor and its x-derivatives; ``Gj`` and
    ``Gjk`` are fibre derivatives of that ``G`` by dual numbers.
    """
    xs, ys = _prepare(m, x, y)

    def G_of(yv):
        return spray_generic_G_c(m, xs, yv)

    def Gj_of(yv):
        cols = [partial(G_of, yv, j) for j in range(2)]  # cols[j][i]
        return [[cols[j][i] for j in range(2)] for i in range(2)]

    G = G_of(ys)
    Gj = Gj_of(ys)
    dGj = [partial(Gj_of, ys, k) for k in range(2)]  # dGj[k][i][j]
    Gjk = [[[dGj[k][i][j] for k in range(2)] for j in range(2)] for i in range(2)]
    z = 0.0 * ys[0]
    return SprayData(
        G=_stack([g + z for g in G]),
        Gj=_stack([[g + z for g in row] for row in Gj]),
        Gjk=_stack([[[g + z for g in r] for r in row] for row in Gjk]),
        P=None,
    )
