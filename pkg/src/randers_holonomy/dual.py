"""Tagged forward-mode dual numbers.

A :class:`Dual` carries a primal part and a single tangent part, both of which
may themselves be duals (of an older tag), floats, or numpy arrays. Nesting
gives exact higher-order derivatives; tags keep nested differentiation
operators from confusing each other's perturbations when closures capture
variables of an enclosing derivative.

Leaves are usually numpy arrays so that one evaluation covers a whole batch of
sample points.
"""

from __future__ import annotations

import itertools
from typing import Callable

import numpy as np

_tags = itertools.count(1)


def new_tag() -> int:
    return next(_tags)


def _tag(x) -> int:
    return x.tag if isinstance(x, Dual) else 0


def _split(x, tag):
    """Return (primal, tangent) of ``x`` with respect to ``tag``."""
    if isinstance(x, Dual):
        if x.tag == tag:
            return x.val, x.eps
        if x.tag > tag:
            # tag is buried below the outer layer
            v0, v1 = _split(x.val, tag)
            e0, e1 = _split(x.eps, tag)
            return Dual(v0, e0, x.tag), Dual(v1, e1, x.tag)
    return x, 0.0


class Dual:
    """``val + eps * d`` with ``d**2 == 0``; ``tag`` identifies ``d``.

    Invariant: every dual nested inside ``val`` or ``eps`` has a smaller tag.
    """

    __slots__ = ("val", "eps", "tag")
    __array_ufunc__ = None  # ndarray operands defer to the reflected operators

    def __init__(self, val, eps, tag: int):
        self.val = val
        self.eps = eps
        self.tag = tag

    def __repr__(self) -> str:
        return f"Dual({self.val!r}, {self.eps!r}, tag={self.tag})"

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        t = max(self.tag, _tag(other))
        a0, a1 = _split(self, t)
        b0, b1 = _split(other, t)
        return Dual(a0 + b0, a1 + b1, t)

    __radd__ = __add__

    def __sub__(self, other):
        t = max(self.tag, _tag(other))
        a0, a1 = _split(self, t)
        b0, b1 = _split(other, t)
        return Dual(a0 - b0, a1 - b1, t)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.eps, self.tag)

    def __neg__(self):
        return Dual(-self.val, -self.eps, self.tag)

    def __pos__(self):
        return self

    def __mul__(self, other):
        t = max(self.tag, _tag(other))
        a0, a1 = _split(self, t)
        b0, b1 = _split(other, t)
        return Dual(a0 * b0, a0 * b1 + a1 * b0, t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        t = max(self.tag, _tag(other))
        a0, a1 = _split(self, t)
        b0, b1 = _split(other, t)
        q = a0 / b0
        return Dual(q, (a1 - q * b1) / b0, t)

    def __rtruediv__(self, other):
        q = other / self.val
        return Dual(q, -q * self.eps / self.val, self.tag)

    def __pow__(self, p):
        if isinstance(p, Dual):
            raise TypeError("dual exponents are not supported")
        if p == 2:
            return self * self
        return Dual(self.val**p, p * self.val ** (p - 1) * self.eps, self.tag)


def _unary(f: Callable, df: Callable) -> Callable:
    def op(x):
        if isinstance(x, Dual):
            return Dual(op(x.val), df(x.val) * x.eps, x.tag)
        return f(x)

    op.__name__ = f.__name__
    return op


sqrt = _unary(np.sqrt, lambda v: 0.5 / sqrt(v))
sin = _unary(np.sin, lambda v: cos(v))
cos = _unary(np.cos, lambda v: -sin(v))
exp = _unary(np.exp, lambda v: exp(v))
log = _unary(np.log, lambda v: 1.0 / v)


def primal(x):
    """Strip every dual layer, returning the underlying float or array."""
    while isinstance(x, Dual):
        x = x.val
    return x


def derivative(f: Callable, x, direction=1.0):
    """Directional derivative of ``f`` at ``x``.

    ``x`` and ``direction`` may be scalars or equal-length tuples of scalars
    (components may be duals of an enclosing derivative). ``f`` receives the
    perturbed argument in the same shape and may return a scalar or an
    arbitrarily nested list/tuple of scalars; the derivative has the same
    structure.
    """
    tag = new_tag()
    if isinstance(x, (tuple, list)):
        arg = tuple(Dual(xi, di, tag) for xi, di in zip(x, direction))
    else:
        arg = Dual(x, direction, tag)
    return _map(lambda v: _split(v, tag)[1], f(arg))


def value_and_derivative(f: Callable, x, direction=1.0):
    tag = new_tag()
    if isinstance(x, (tuple, list)):
        arg = tuple(Dual(xi, di, tag) for xi, di in zip(x, direction))
    else:
        arg = Dual(x, direction, tag)
    out = f(arg)
    return _map(lambda v: _split(v, tag)[0], out), _map(lambda v: _split(v, tag)[1], out)


def _map(fn, tree):
    if isinstance(tree, (tuple, list)):
        return type(tree)(_map(fn, t) for t in tree)
    return fn(tree)


def partial(f: Callable, x, k: int, n: int = 2):
    """Partial derivative of ``f`` in the ``k``-th slot of the ``n``-tuple ``x``."""
    tag = new_tag()
    arg = tuple(Dual(xi, 1.0, tag) if i == k else xi for i, xi in enumerate(x[:n]))
    return _map(lambda v: _split(v, tag)[1], f(arg))


def gradient(f: Callable, x, n: int = 2):
    return [partial(f, x, k, n) for k in range(n)]
