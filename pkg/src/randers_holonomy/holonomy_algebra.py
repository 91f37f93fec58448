"""Circle vector fields in a truncated Fourier basis and the holonomy algebra.

A :class:`CircleField` of order ``N`` stands for ``f(t) d/dt`` with

    f(t) = a_0 + sum_{k=1..N} a_k cos kt + b_k sin kt.

Brackets are exact (``[f d/dt, g d/dt] = (f g' - g f') d/dt`` by coefficient
convolution) and raise the order to ``u.order + v.order``; nothing is ever
aliased back into a lower band. Aliasing would invent rank.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Sequence

import numpy as np

RANK_TOL = 1e-9
DEFAULT_ORDER = 64


class CapacityError(ValueError):
    """A bracket result does not fit in the requested Fourier order."""


@dataclass(frozen=True)
class CircleField:
    """``f(t) d/dt`` stored as ``a`` (cosines, ``a[0]`` constant) and ``b`` (sines, ``b[0] == 0``)."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float).copy()
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("cosine and sine coefficient arrays must be 1-d and equal length")
        b[0] = 0.0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def order(self) -> int:
        return len(self.a) - 1

    @classmethod
    def from_vector(cls, v) -> "CircleField":
        """Inverse of :attr:`vector`."""
        v = np.asarray(v, dtype=float)
        n = (len(v) - 1) // 2
        a = np.concatenate([[v[0]], v[1::2]])
        b = np.concatenate([[0.0], v[2::2]])
        assert len(a) == n + 1
        return cls(a, b)

    @property
    def vector(self) -> np.ndarray:
        """Length ``2N+1`` coefficients ``[a0, a1, b1, a2, b2, ...]``."""
        v = np.empty(2 * self.order + 1)
        v[0] = self.a[0]
        v[1::2] = self.a[1:]
        v[2::2] = self.b[1:]
        return v

    def degree(self, tol: float = 1e-13) -> int:
        """Highest frequency carrying a coefficient above ``tol`` times the largest."""
        mag = np.maximum(np.abs(self.a), np.abs(self.b))
        big = np.nonzero(mag > tol * max(mag.max(), 1e-300))[0]
        return int(big[-1]) if big.size else 0

    def resize(self, order: int, *, tol: float = 1e-12) -> "CircleField":
        """Zero-pad or truncate; truncation refuses to drop significant content."""
        if order >= self.order:
            pad = order - self.order
            return CircleField(np.pad(self.a, (0, pad)), np.pad(self.b, (0, pad)))
        tail = max(np.max(np.abs(self.a[order + 1 :])), np.max(np.abs(self.b[order + 1 :])))
        scale = max(np.max(np.abs(self.a)), np.max(np.abs(self.b)), 1.0)
        if tail > tol * scale:
            raise CapacityError(f"field has content above order {order} (|tail| = {tail:.3e})")
        return CircleField(self.a[: order + 1], self.b[: order + 1])

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        k = np.arange(self.order + 1)
        kt = np.multiply.outer(t, k)
        return np.cos(kt) @ self.a + np.sin(kt) @ self.b

    def __add__(self, other: "CircleField") -> "CircleField":
        n = max(self.order, other.order)
        u, v = self.resize(n), other.resize(n)
        return CircleField(u.a + v.a, u.b + v.b)

    def __sub__(self, other: "CircleField") -> "CircleField":
        return self + (-1.0) * other

    def __mul__(self, s: float) -> "CircleField":
        return CircleField(s * self.a, s * self.b)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    # complex exponential form, index k + N for frequency k
    def _exp_coeffs(self) -> np.ndarray:
        n = self.order
        c = np.zeros(2 * n + 1, dtype=complex)
        c[n] = self.a[0]
        c[n + 1 :] = 0.5 * (self.a[1:] - 1j * self.b[1:])
        c[:n] = (0.5 * (self.a[1:] + 1j * self.b[1:]))[::-1]
        return c

    @classmethod
    def _from_exp(cls, c: np.ndarray) -> "CircleField":
        n = (len(c) - 1) // 2
        pos = c[n + 1 :]
        return cls(np.concatenate([[c[n].real], 2.0 * pos.real]), np.concatenate([[0.0], -2.0 * pos.imag]))

    def derivative(self) -> "CircleField":
        k = np.arange(self.order + 1)
        return CircleField(k * self.b, -k * self.a)


def constant(order: int = 0, value: float = 1.0) -> CircleField:
    """``value * d/dt``."""
    a = np.zeros(order + 1)
    a[0] = value
    return CircleField(a, np.zeros(order + 1))


def cos_mode(n: int, order: int | None = None) -> CircleField:
    order = n if order is None else order
    a = np.zeros(order + 1)
    a[n] = 1.0
    return CircleField(a, np.zeros(order + 1))


def sin_mode(n: int, order: int | None = None) -> CircleField:
    order = n if order is None else order
    b = np.zeros(order + 1)
    b[n] = 1.0
    return CircleField(np.zeros(order + 1), b)


def project(f, order: int, grid: int | None = None) -> CircleField:
    """Trapezoidal Fourier projection of a 2pi-periodic function.

    ``f`` is a callable or an array of samples on the uniform grid
    ``2 pi j / M``. The grid needs at least ``4 * order`` points; the result is
    exact for trigonometric polynomials of degree ``<= order``.
    """
    if callable(f):
        m = grid if grid is not None else max(4 * order, 64)
        values = np.asarray(f(2.0 * np.pi * np.arange(m) / m), dtype=float)
    else:
        values = np.asarray(f, dtype=float)
        m = values.shape[-1]
    if m < 4 * order:
        raise ValueError(f"grid of {m} points is too coarse for order {order} (need >= {4 * order})")
    c = np.fft.rfft(values) / m
    a = np.zeros(order + 1)
    b = np.zeros(order + 1)
    a[0] = c[0].real
    top = min(order, len(c) - 1)
    a[1 : top + 1] = 2.0 * c[1 : top + 1].real
    b[1 : top + 1] = -2.0 * c[1 : top + 1].imag
    return CircleField(a, b)


def product(u: CircleField, v: CircleField) -> CircleField:
    """Pointwise product of the coefficient functions, order ``u.order + v.order``."""
    return CircleField._from_exp(np.convolve(u._exp_coeffs(), v._exp_coeffs()))


def bracket(u: CircleField, v: CircleField, max_order: int | None = None) -> CircleField:
    """Lie bracket ``[u, v] = (u v' - v u') d/dt``.

    The exact result has order ``u.order + v.order``. With ``max_order`` the
    result is truncated to that order, raising :class:`CapacityError` if that
    would drop nonzero content.
    """
    du, dv = u.derivative(), v.derivative()
    w = CircleField._from_exp(
        np.convolve(u._exp_coeffs(), dv._exp_coeffs()) - np.convolve(v._exp_coeffs(), du._exp_coeffs())
    )
    if max_order is not None and max_order != w.order:
        w = w.resize(max_order)
    return w


# ---------------------------------------------------------------------------
# spans


@dataclass
class SpanBasis:
    """Numerical span of a family of circle fields.

    ``basis`` holds orthonormal coefficient rows (one per retained direction).
    ``strengths`` are the singular values of the field matrix for spans built
    by SVD, or the relative out-of-span residual of each accepted field for
    spans grown incrementally.
    """

    fields: list
    basis: np.ndarray
    rank: int
    tol: float
    strengths: np.ndarray
    history: list = field(default_factory=list)
    skipped: int = 0

    def residual(self, f: CircleField) -> float:
        """Distance from ``f`` to the span, relative to ``|f|``."""
        v = _padded(f, self.basis.shape[1])
        proj = self.basis.T @ (self.basis @ v) if self.rank else 0.0 * v
        nv = np.linalg.norm(v)
        return float(np.linalg.norm(v - proj) / nv) if nv > 0 else 0.0


def _padded(f: CircleField, width: int) -> np.ndarray:
    return f.resize((width - 1) // 2).vector


class _GramSchmidt:
    """Incremental orthonormal basis; twice-applied projection keeps it orthogonal."""

    def __init__(self, width: int, tol: float):
        self.rows: list = []
        self.residuals: list = []
        self.width = width
        self.tol = tol

    def matrix(self) -> np.ndarray:
        return np.array(self.rows) if self.rows else np.zeros((0, self.width))

    def add(self, v) -> bool:
        v = np.asarray(v, dtype=float)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return False
        r = v / nv
        if self.rows:
            q = self.matrix()
            r = r - q.T @ (q @ r)
            r = r - q.T @ (q @ r)
        nr = np.linalg.norm(r)
        if nr <= self.tol:
            return False
        self.rows.append(r / nr)
        self.residuals.append(nr)
        return True


def span(fields: Sequence[CircleField], tol: float = RANK_TOL) -> SpanBasis:
    """Orthonormal basis of the span by singular-value thresholding."""
    fields = list(fields)
    order = max(f.order for f in fields)
    mat = np.array([f.resize(order).vector for f in fields])
    _, s, vt = np.linalg.svd(mat, full_matrices=False)
    rank = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return SpanBasis(fields, vt[:rank], rank, tol, s)


def write_coefficients_csv(path, fields: Sequence[CircleField]) -> None:
    """One row per field: ``a0, a1, b1, a2, b2, ...`` with a header."""
    order = max(f.order for f in fields)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = ["a0"] + [f"{p}{k}" for k in range(1, order + 1) for p in ("a", "b")]
        w.writerow(header)
        for f in fields:
            w.writerow([repr(float(x)) for x in f.resize(order).vector])


# ---------------------------------------------------------------------------
# the curvature field at the origin and its functional multiples


def xi0(m, *, grid: int = 256, order: int = 8) -> CircleField:
    """The restricted curvature field at the origin as a circle field.

    Uses the closed form for ``epsilon = +1`` and the numerically restricted
    curvature field otherwise.
    """
    from .indicatrix import omega_closed_form

    if m.epsilon == 1:
        return project(lambda t: omega_closed_form(m, t), 2, grid=max(grid, 8))
    return project(restricted_curvature_coefficient(m, grid), order)


def restricted_curvature_coefficient(m, grid: int = 256) -> np.ndarray:
    from .covariant import curvature_field
    from .indicatrix import origin_chart, restrict_field, uniform_grid

    t = uniform_grid(grid)
    chart = origin_chart(m)
    y = chart.point(t)
    c, _ = restrict_field(chart, curvature_field(m).evaluate(m, np.zeros_like(y), y), t)
    return c


def multiple(omega: CircleField, l: int, mm: int) -> CircleField:
    """``sin^l t cos^m t * omega`` exactly (order ``omega.order + l + m``)."""
    out = omega
    for _ in range(l):
        out = product(out, sin_mode(1))
    for _ in range(mm):
        out = product(out, cos_mode(1))
    return out


def sigma_generators(omega: CircleField, n: int) -> list:
    return [multiple(omega, l, mm) for l in range(n + 1) for mm in range(n + 1 - l)]


def sigma_basis(m, n: int, tol: float = RANK_TOL, *, omega: CircleField | None = None, max_n: int = 12) -> SpanBasis:
    """Span of ``sin^l t cos^m t * xi0`` over ``l + m <= n``."""
    if n > max_n:
        raise ValueError(f"n={n} exceeds the cap {max_n}")
    omega = xi0(m) if omega is None else omega
    return span(sigma_generators(omega, n), tol)


# ---------------------------------------------------------------------------
# algebra generation


def generate_algebra(
    seeds: Sequence[CircleField],
    max_dim: int | None = None,
    max_rounds: int = 6,
    *,
    order: int = DEFAULT_ORDER,
    tol: float = RANK_TOL,
) -> SpanBasis:
    """Close ``span(seeds)`` under brackets, round by round.

    Each round brackets every pair that involves at least one element found
    in the previous round. Pairs whose exact bracket would exceed ``order``
    are skipped and counted in ``skipped``; nothing is truncated. Stops when
    the rank stabilizes, ``max_dim`` is reached, or after ``max_rounds``.
    """
    elems: list = []
    width = 2 * order + 1

    gs = _GramSchmidt(width, tol)

    def try_add(f):
        f = f.resize(order)
        if gs.add(f.vector):
            elems.append(f)
            return True
        return False

    for s in seeds:
        if s.order > order:
            s = s.resize(order)
        try_add(s)
    history = [len(elems)]
    frontier = list(range(len(elems)))
    skipped = 0
    for _ in range(max_rounds):
        if max_dim is not None and len(elems) >= max_dim:
            break
        start = len(elems)
        fresh = set(frontier)
        for i in range(start):
            for j in range(i + 1, start):
                if i not in fresh and j not in fresh:
                    continue
                u, v = elems[i], elems[j]
                if u.degree() + v.degree() > order:
                    skipped += 1
                    continue
                w = bracket(u.resize(u.degree()), v.resize(v.degree()))
                try_add(w)
                if max_dim is not None and len(elems) >= max_dim:
                    break
        history.append(len(elems))
        frontier = list(range(start, len(elems)))
        if not frontier:
            break
    return SpanBasis(elems, gs.matrix(), len(elems), tol, np.asarray(gs.residuals), history, skipped)


def membership_residual(generators: Sequence[CircleField], target: CircleField) -> float:
    """Relative least-squares distance from ``target`` to ``span(generators)``."""
    order = max(max(g.order for g in generators), target.order)
    mat = np.array([g.resize(order).vector for g in generators]).T
    v = target.resize(order).vector
    coef, *_ = np.linalg.lstsq(mat, v, rcond=None)
    nv = np.linalg.norm(v)
    return float(np.linalg.norm(mat @ coef - v) / nv) if nv > 0 else 0.0


# ---------------------------------------------------------------------------
# identities used by the induction


def bracket_cos_identity(omega_a1: float, n: int, omega: CircleField):
    """``[xi0, cos^{n-1} t xi0]`` and its three-term expansion (both sides)."""
    a = omega_a1
    lhs = bracket(omega, multiple(omega, 0, n - 1))
    rhs = (
        (n - 1) / 4 * multiple(omega, 1, n - 2)
        + a * (n - 1) / 2 * multiple(omega, 1, n - 1)
        + a * a * (n - 1) / 4 * multiple(omega, 1, n)
    )
    return lhs, rhs


def bracket_sin_identity(omega_a1: float, n: int, omega: CircleField, *, as_printed: bool = False):
    """``[xi0, sin t cos^{n-2} t xi0]`` and its five-term expansion (both sides).

    ``as_printed=True`` uses the coefficients exactly as they circulate in the
    literature (leading ``(n-3)/4`` and a repeated ``cos^{n-1}`` term), which
    do not satisfy the identity; the default uses the expansion that does.
    """
    a = omega_a1
    lhs = bracket(omega, multiple(omega, 1, n - 2))
    if as_printed:
        rhs = (
            (n - 3) / 4 * multiple(omega, 0, n - 3)
            + a * (n - 2) / 2 * multiple(omega, 0, n - 2)
            + (a * a * (n - 2) - (n - 1)) / 4 * multiple(omega, 0, n - 1)
            - a * (n - 1) / 2 * multiple(omega, 0, n - 1)
            - a * a * (n - 1) / 4 * multiple(omega, 0, n + 1)
        )
    else:
        rhs = (
            (n - 2) / 4 * multiple(omega, 0, n - 3)
            + a * (n - 2) / 2 * multiple(omega, 0, n - 2)
            + (a * a * (n - 2) - (n - 1)) / 4 * multiple(omega, 0, n - 1)
            - a * (n - 1) / 2 * multiple(omega, 0, n)
            - a * a * (n - 1) / 4 * multiple(omega, 0, n + 1)
        )
    return lhs, rhs


def coefficient_error(u: CircleField, v: CircleField) -> float:
    n = max(u.order, v.order)
    return float(np.max(np.abs(u.resize(n).vector - v.resize(n).vector)))


def multiple_angle_fields(omega: CircleField, n: int):
    """``(sin nt xi0, cos nt xi0)`` assembled from ``sin^{n-k} t cos^k t xi0``.

    Binomial expansion of ``(cos t + i sin t)^n``: the ``k``-th term carries
    ``cos^k t sin^{n-k} t`` with weights ``C(n, k) sin((n-k) pi/2)`` and
    ``C(n, k) cos((n-k) pi/2)``.
    """
    s = 0.0 * omega
    c = 0.0 * omega
    for k in range(n + 1):
        term = multiple(omega, n - k, k)
        r = (n - k) % 4  # sin/cos of (n-k) pi/2 exactly
        ws = (0.0, 1.0, 0.0, -1.0)[r]
        wc = (1.0, 0.0, -1.0, 0.0)[r]
        s = s + comb(n, k) * ws * term
        c = c + comb(n, k) * wc * term
    return s, c


def multiple_angle_check(omega: CircleField, n: int, *, grid: int | None = None, max_n: int = 12) -> float:
    """Largest coefficient error between the binomial assembly and direct projection."""
    if n > max_n:
        raise ValueError(f"n={n} exceeds the cap {max_n}")
    order = omega.order + n
    m = grid if grid is not None else 4 * order + 4
    s_sum, c_sum = multiple_angle_fields(omega, n)
    s_dir = project(lambda t: np.sin(n * t) * omega(t), order, grid=m)
    c_dir = project(lambda t: np.cos(n * t) * omega(t), order, grid=m)
    return max(coefficient_error(s_sum, s_dir), coefficient_error(c_sum, c_dir))


# ---------------------------------------------------------------------------
# Fejer means


@dataclass
class FejerCurve:
    orders: np.ndarray
    errors: np.ndarray

    @property
    def decreasing(self) -> bool:
        return bool(np.all(np.diff(self.errors) <= 1e-15 * max(self.errors[0], 1.0)))


def fejer_mean(target: Callable, n: int, grid: int = 4096) -> Callable:
    """Cesaro mean of the first ``n`` Fourier partial sums of ``target``."""
    t = 2.0 * np.pi * np.arange(grid) / grid
    c = np.fft.rfft(np.asarray(target(t), dtype=float)) / grid
    k = np.arange(min(n, len(c) - 1) + 1)
    w = 1.0 - k / (n + 1.0)
    a = 2.0 * c[k].real * w
    b = -2.0 * c[k].imag * w
    a[0] = c[0].real
    return CircleField(a, b)


def fejer_membership(target: Callable, n_max: int, *, grid: int = 4096) -> FejerCurve:
    """Sup-norm error of the order-``N`` Fejer mean of ``target`` for ``N = 1..n_max``.

    Errors are measured on a ``grid``-point uniform mesh; the target's Fourier
    coefficients come from the same mesh.
    """
    t = 2.0 * np.pi * np.arange(grid) / grid
    f = np.asarray(target(t), dtype=float)
    c = np.fft.rfft(f) / grid
    kk = np.arange(len(c))
    errs = []
    for n in range(1, n_max + 1):
        w = np.clip(1.0 - kk / (n + 1.0), 0.0, None)
        spec = c * w
        approx = np.fft.irfft(spec * grid, n=grid)
        errs.append(np.max(np.abs(approx - f)))
    return FejerCurve(np.arange(1, n_max + 1), np.asarray(errs))


def partial_sum_errors(target: Callable, n_max: int, *, grid: int = 4096) -> np.ndarray:
    """Sup-norm error of the plain Fourier partial sums, for comparison."""
    t = 2.0 * np.pi * np.arange(grid) / grid
    f = np.asarray(target(t), dtype=float)
    c = np.fft.rfft(f) / grid
    kk = np.arange(len(c))
    out = []
    for n in range(1, n_max + 1):
        out.append(np.max(np.abs(np.fft.irfft(c * (kk <= n) * grid, n=grid) - f)))
    return np.asarray(out)
