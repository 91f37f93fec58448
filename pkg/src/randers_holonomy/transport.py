"""Parallel transport along paths and holonomy maps of loops.

The nonlinear parallel-transport equation ``dX^i/ds + G^i_j(c(s), X) c'^j(s) = 0``
is integrated with fixed-step classical RK4, segment by segment. A whole
batch of initial vectors (one per indicatrix sample) is integrated at once.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .indicatrix import general_chart, origin_chart
from .model import DomainError, ModelVariant, check_point, check_vector, finsler_c, nonlinear_connection_c

MIN_STEPS = 8
ROUNDOFF_PROFILE = 1e-10


class MonotonicityError(RuntimeError):
    """A computed holonomy lift is not strictly increasing."""


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class Segment:
    """Straight segment or circular arc, parametrized over ``s`` in ``[0, 1]``."""

    kind: str
    start: tuple
    end: tuple
    center: tuple = (0.0, 0.0)
    radius: float = 0.0
    theta0: float = 0.0
    theta1: float = 0.0

    def point(self, s):
        if self.kind == "line":
            return (
                self.start[0] + s * (self.end[0] - self.start[0]),
                self.start[1] + s * (self.end[1] - self.start[1]),
            )
        th = self.theta0 + s * (self.theta1 - self.theta0)
        return (self.center[0] + self.radius * np.cos(th), self.center[1] + self.radius * np.sin(th))

    def velocity(self, s):
        if self.kind == "line":
            return (self.end[0] - self.start[0], self.end[1] - self.start[1])
        dth = self.theta1 - self.theta0
        th = self.theta0 + s * dth
        return (-self.radius * dth * np.sin(th), self.radius * dth * np.cos(th))

    def reversed(self) -> "Segment":
        return Segment(self.kind, self.end, self.start, self.center, self.radius, self.theta1, self.theta0)


@dataclass(frozen=True)
class PathSpec:
    """Piecewise smooth curve in the chart, each segment run at constant parameter speed."""

    segments: tuple
    kind: str = "polyline"
    origin: tuple = field(default=(0.0, 0.0))

    @classmethod
    def polyline(cls, vertices: Sequence) -> "PathSpec":
        verts = [(float(v[0]), float(v[1])) for v in vertices]
        if not verts:
            raise ValueError("polyline needs at least one vertex")
        segs = tuple(Segment("line", a, b) for a, b in zip(verts[:-1], verts[1:]))
        return cls(segs, "polyline", verts[0])

    @classmethod
    def rectangle(cls, corner, width: float, height: float) -> "PathSpec":
        """Counter-clockwise rectangle starting and ending at ``corner``."""
        x, y = float(corner[0]), float(corner[1])
        p = cls.polyline([(x, y), (x + width, y), (x + width, y + height), (x, y + height), (x, y)])
        return cls(p.segments, "rectangle", p.origin)

    @classmethod
    def circle(cls, center, radius: float) -> "PathSpec":
        """Counter-clockwise circle starting and ending at ``center + (radius, 0)``."""
        c = (float(center[0]), float(center[1]))
        p0 = (c[0] + radius, c[1])
        return cls((Segment("arc", p0, p0, c, float(radius), 0.0, 2.0 * np.pi),), "circle", p0)

    @property
    def start(self) -> tuple:
        return self.segments[0].start if self.segments else self.origin

    @property
    def end(self) -> tuple:
        return self.segments[-1].end if self.segments else self.origin

    @property
    def closed(self) -> bool:
        return self.start == self.end

    def reversed(self) -> "PathSpec":
        return PathSpec(tuple(s.reversed() for s in reversed(self.segments)), self.kind, self.end)

    def then(self, other: "PathSpec") -> "PathSpec":
        """Concatenation: run ``self`` first, then ``other``."""
        if self.end != other.start:
            raise ValueError("paths do not connect")
        return PathSpec(self.segments + other.segments, "composite", self.start)

    def nodes(self, steps: int) -> np.ndarray:
        """Points visited by the integrator, shape ``(2, n)``."""
        pts = [np.array([self.origin[0]]), np.array([self.origin[1]])]
        s = np.linspace(0.0, 1.0, 2 * steps + 1)
        xs, ys = [pts[0]], [pts[1]]
        for seg in self.segments:
            p = seg.point(s)
            xs.append(np.broadcast_to(p[0], s.shape))
            ys.append(np.broadcast_to(p[1], s.shape))
        return np.array([np.concatenate(xs), np.concatenate(ys)])


@dataclass
class TransportResult:
    y: np.ndarray
    drift: float


def _rhs(m: ModelVariant, point, vel, Y):
    Gj = nonlinear_connection_c(m, point, (Y[0], Y[1]))
    return np.array(
        [
            -(Gj[0][0] * vel[0] + Gj[0][1] * vel[1]),
            -(Gj[1][0] * vel[0] + Gj[1][1] * vel[1]),
        ]
    )


def _integrate(m: ModelVariant, path: PathSpec, Y0: np.ndarray, steps: int, track_drift: bool) -> TransportResult:
    if steps < MIN_STEPS:
        raise ValueError(f"need at least {MIN_STEPS} steps per segment, got {steps}")
    if m.on_disk:
        try:
            check_point(m, path.nodes(steps))
        except DomainError as exc:
            raise DomainError(f"path leaves the domain: {exc}") from None
    Y = np.array(Y0, dtype=float)
    x0 = path.start
    F0 = finsler_c(m, x0, (Y[0], Y[1])) if track_drift else None
    drift = 0.0
    h = 1.0 / steps
    for seg in path.segments:
        for n in range(steps):
            s = n * h
            p0, v0 = seg.point(s), seg.velocity(s)
            pm, vm = seg.point(s + 0.5 * h), seg.velocity(s + 0.5 * h)
            p1, v1 = seg.point(s + h), seg.velocity(s + h)
            k1 = _rhs(m, p0, v0, Y)
            k2 = _rhs(m, pm, vm, Y + 0.5 * h * k1)
            k3 = _rhs(m, pm, vm, Y + 0.5 * h * k2)
            k4 = _rhs(m, p1, v1, Y + h * k3)
            Y = Y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if track_drift:
                drift = max(drift, float(np.max(np.abs(finsler_c(m, p1, (Y[0], Y[1])) - F0))))
    return TransportResult(Y, drift)


def transport_vector(m: ModelVariant, path: PathSpec, y0, steps: int = 512) -> np.ndarray:
    """Parallel transport of ``y0`` (shape ``(2,)`` or ``(2, N)``) along ``path``."""
    y0 = check_vector(y0)
    return _integrate(m, path, y0, steps, track_drift=False).y


def transport(m: ModelVariant, path: PathSpec, y0, steps: int = 512) -> TransportResult:
    """Like :func:`transport_vector`, also reporting ``max |F(c(s), X(s)) - F(c(0), X(0))|``."""
    y0 = check_vector(y0)
    return _integrate(m, path, y0, steps, track_drift=True)


@dataclass
class HolonomyMap:
    """Sampled lift ``t_in -> t_out`` of the holonomy map on the indicatrix circle."""

    x: np.ndarray
    t_in: np.ndarray
    t_out: np.ndarray
    drift: float

    @property
    def displacement(self) -> np.ndarray:
        return self.t_out - self.t_in

    @property
    def monotonicity_margin(self) -> float:
        """Smallest gap of the lift over one period (positive iff strictly increasing)."""
        gaps = np.diff(np.concatenate([self.t_out, [self.t_out[0] + 2.0 * np.pi]]))
        return float(np.min(gaps))

    def summary(self) -> dict:
        d = self.displacement
        return {
            "samples": int(len(self.t_in)),
            "f_drift": float(self.drift),
            "monotonicity_margin": self.monotonicity_margin,
            "displacement_mean": float(np.mean(d)),
            "displacement_std": float(np.std(d, ddof=1)) if len(d) > 1 else 0.0,
            "displacement_min": float(np.min(d)),
            "displacement_max": float(np.max(d)),
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_in", "t_out", "displacement"])
            for row in zip(self.t_in, self.t_out, self.displacement):
                w.writerow([repr(float(v)) for v in row])


def _lift(t_in: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Continuous lift of the output angles, anchored at the first sample."""
    lifted = np.unwrap(angles)
    shift = np.round((t_in[0] - lifted[0]) / (2.0 * np.pi)) * 2.0 * np.pi
    return lifted + shift


def holonomy_map(m: ModelVariant, loop: PathSpec, samples: int = 64, steps: int = 512, *, check: bool = True) -> HolonomyMap:
    """Holonomy of ``loop`` acting on the indicatrix at its base point.

    Raises :class:`MonotonicityError` (when ``check``) if the lift is not
    strictly increasing, which means the integrator resolution is too low.
    """
    if not loop.closed:
        raise ValueError("holonomy needs a closed loop")
    if samples < 16:
        raise ValueError(f"need at least 16 indicatrix samples, got {samples}")
    x0 = np.array(loop.start, dtype=float)
    chart = origin_chart(m) if not np.any(x0) else general_chart(m, x0)
    t_in = 2.0 * np.pi * np.arange(samples) / samples
    y0 = chart.point(t_in)
    res = _integrate(m, loop, y0, steps, track_drift=True)
    t_out = _lift(t_in, chart.parameter(res.y))
    hm = HolonomyMap(x0, t_in, t_out, res.drift)
    if check and hm.monotonicity_margin <= 0.0:
        raise MonotonicityError("holonomy lift is not strictly increasing; raise the step count")
    return hm


@dataclass
class SmallLoopResult:
    t: np.ndarray
    profile: np.ndarray
    order: float
    raw: list
    sides: tuple


def small_loop_generator(m: ModelVariant, h: float = 0.1, samples: int = 64, steps: int = 64) -> SmallLoopResult:
    """Infinitesimal holonomy of small squares at the origin.

    For squares of side ``h, h/2, h/4`` with a corner at the origin, computes
    ``d_h(t) = (t_out - t_in) / h^2`` and Richardson-extrapolates
    ``d_h = d_0 + C h + D h^2`` to ``h -> 0``. Also returns the observed
    convergence order of ``d_h``. Raises :class:`ConvergenceError` when that
    order falls below 0.5.
    """
    if h > 0.1:
        raise ValueError("initial side must be <= 0.1")
    sides = (h, h / 2.0, h / 4.0)
    raw = []
    t = None
    for s in sides:
        hm = holonomy_map(m, PathSpec.rectangle((0.0, 0.0), s, s), samples, steps)
        t = hm.t_in
        raw.append(hm.displacement / s**2)
    d1, d2, d3 = raw
    r1 = 2.0 * d2 - d1
    r2 = 2.0 * d3 - d2
    profile = (4.0 * r2 - r1) / 3.0
    e1 = np.max(np.abs(d1 - d2))
    e2 = np.max(np.abs(d2 - d3))
    if max(e1, e2) < ROUNDOFF_PROFILE:
        # profiles agree to roundoff (dividing by h^2 amplifies it), nothing to estimate
        order = float("inf")
    else:
        order = float(np.log2(e1 / e2)) if e2 > 0 else float("inf")
        if order < 0.5:
            raise ConvergenceError(f"small-loop profile does not converge (observed order {order:.3f})")
    return SmallLoopResult(t, profile, order, raw, sides)
