"""Spherical geometry on the unit sphere.

Orientation convention, used throughout the package: a curve is traversed
with the region it bounds on its *left*, and its signed geodesic curvature
is positive when it bends toward that left side.  With this convention the
Gauss-Bonnet formula for a region R reads

    area(R) = 2*pi - sum(kappa_e * length_e) - sum(alpha_i)

where alpha_i are the signed left-turning angles at the corners.  A circle
of constant curvature kappa is the set of points at angular distance
``rho = arccot(kappa)`` from an *axis* u, traversed counterclockwise about
u (seen from outside the sphere).  ``rho`` ranges over (0, pi), so negative
curvature simply means rho > pi/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi

CONSTRUCTION_TOL = 1e-12
CLOSURE_TOL = 1e-10


class GeometryError(ValueError):
    """Raised for degenerate or out-of-domain geometric input."""


@dataclass(frozen=True)
class SpherePoint:
    """A unit vector.  Coordinates are normalized on construction."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        n = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if not n > 0 or not math.isfinite(n):
            raise GeometryError(f"cannot normalize vector ({self.x}, {self.y}, {self.z})")
        # leave already-unit input bit-for-bit unchanged so serialization round-trips
        if abs(n - 1.0) > 1e-15:
            object.__setattr__(self, "x", self.x / n)
            object.__setattr__(self, "y", self.y / n)
            object.__setattr__(self, "z", self.z / n)

    @classmethod
    def of(cls, v: Sequence[float]) -> "SpherePoint":
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __neg__(self) -> "SpherePoint":
        return SpherePoint(-self.x, -self.y, -self.z)


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n == 0:
        raise GeometryError("zero vector has no direction")
    return v / n


def angle_between(a: np.ndarray, b: np.ndarray) -> float:
    """Angle between two 3-vectors via atan2, accurate near 0 and pi."""
    return math.atan2(float(np.linalg.norm(np.cross(a, b))), float(np.dot(a, b)))


def spherical_distance(p: SpherePoint, q: SpherePoint) -> float:
    return angle_between(p.vec, q.vec)


def isoperimetric_profile(area: float) -> float:
    """Least length of a curve enclosing ``area`` on the unit sphere."""
    if not 0.0 <= area <= FOUR_PI:
        raise GeometryError(f"area {area} outside [0, 4*pi]")
    return math.sqrt(area * (FOUR_PI - area))


def split_profile(k: float, t: float) -> float:
    """Sum of the profiles of the two pieces when area k is split as t, k - t."""
    if not 0.0 < k <= TWO_PI:
        raise GeometryError(f"k = {k} outside (0, 2*pi]")
    if not 0.0 <= t <= k:
        raise GeometryError(f"t = {t} outside [0, {k}]")
    return math.sqrt(t * (FOUR_PI - t)) + math.sqrt((k - t) * (FOUR_PI - k + t))


def _rotate(p: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation of p about the unit vector ``axis``."""
    c, s = math.cos(angle), math.sin(angle)
    return p * c + np.cross(axis, p) * s + axis * np.dot(axis, p) * (1.0 - c)


@dataclass(frozen=True)
class CircleSpec:
    """A full circle: points at angular distance ``radius`` from ``center``.

    Traversed counterclockwise about ``center``, so the enclosed cap is on
    the left and ``kappa = cot(radius)``.
    """

    center: SpherePoint
    radius: float

    def __post_init__(self):
        if not 0.0 < self.radius < math.pi:
            raise GeometryError(f"circle radius {self.radius} outside (0, pi)")

    @property
    def kappa(self) -> float:
        return math.cos(self.radius) / math.sin(self.radius)

    @property
    def perimeter(self) -> float:
        return TWO_PI * math.sin(self.radius)

    @property
    def enclosed_area(self) -> float:
        # 2*pi*(1 - cos r) without cancellation for small r
        return FOUR_PI * math.sin(0.5 * self.radius) ** 2

    def reversed(self) -> "CircleSpec":
        return CircleSpec(-self.center, math.pi - self.radius)

    def sample(self, m: int, phase: float = 0.0) -> np.ndarray:
        """``m`` equally spaced points, counterclockwise about the center."""
        u = self.center.vec
        helper = np.array([1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = _unit(np.cross(u, helper))
        e2 = np.cross(u, e1)
        th = phase + TWO_PI * np.arange(m) / m
        s, c = math.sin(self.radius), math.cos(self.radius)
        return (c * u[None, :] + s * (np.cos(th)[:, None] * e1 + np.sin(th)[:, None] * e2))


def circle_for_area(area: float, center: SpherePoint | None = None) -> CircleSpec:
    if not 0.0 < area < FOUR_PI:
        raise GeometryError(f"no circle encloses area {area}")
    if center is None:
        center = SpherePoint(0.0, 0.0, 1.0)
    # 1 - cos r = A / 2pi  <=>  sin(r/2) = sqrt(A / 4pi)
    return CircleSpec(center, 2.0 * math.asin(math.sqrt(area / FOUR_PI)))


@dataclass(frozen=True)
class Arc:
    """A constant-curvature arc from ``start`` to ``end``.

    Use :func:`arc_between` to build one; it resolves the rotation ``axis``
    and the swept angle.  ``minor`` selects the shorter of the two arcs of
    the supporting circle that run from start to end in the direction
    forced by the sign of ``kappa``.
    """

    start: SpherePoint
    end: SpherePoint
    kappa: float
    minor: bool
    axis: SpherePoint
    sweep: float

    @property
    def rho(self) -> float:
        return math.atan2(1.0, self.kappa)

    @property
    def length(self) -> float:
        return math.sin(self.rho) * self.sweep

    def reversed(self) -> "Arc":
        return Arc(self.end, self.start, -self.kappa, self.minor, -self.axis, self.sweep)

    def start_tangent(self) -> np.ndarray:
        return _unit(np.cross(self.axis.vec, self.start.vec))

    def end_tangent(self) -> np.ndarray:
        return _unit(np.cross(self.axis.vec, self.end.vec))

    def sample(self, m: int) -> np.ndarray:
        """``m >= 2`` points, equally spaced by arc length, endpoints exact."""
        if m < 2:
            raise GeometryError("an arc needs at least two sample points")
        u, p = self.axis.vec, self.start.vec
        pts = np.array([_rotate(p, u, self.sweep * i / (m - 1)) for i in range(m)])
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        pts[0], pts[-1] = self.start.vec, self.end.vec
        return pts


def arc_between(p: SpherePoint, q: SpherePoint, kappa: float, minor: bool = True,
                axis: SpherePoint | None = None) -> Arc:
    """Arc of signed geodesic curvature ``kappa`` from p to q.

    ``axis`` is only needed to disambiguate antipodal endpoints of a great
    circle arc, where it must be orthogonal to both.
    """
    pv, qv = p.vec, q.vec
    chord = float(np.linalg.norm(pv - qv))
    if chord == 0.0:
        raise GeometryError("arc endpoints coincide; use CircleSpec for full circles")
    rho = math.atan2(1.0, kappa)
    s = pv + qv
    w = np.cross(pv, qv)
    wn = float(np.linalg.norm(w))

    if axis is not None:
        u = axis.vec
        if abs(np.dot(u, pv) - math.cos(rho)) > 1e-9 or abs(np.dot(u, qv) - math.cos(rho)) > 1e-9:
            raise GeometryError("supplied axis is not equidistant at arccot(kappa) from both endpoints")
    else:
        if wn < 1e-14:
            if kappa == 0.0:
                raise GeometryError("ambiguous geodesic between antipodal points")
            raise GeometryError("no such circle: endpoints are antipodal")
        if chord > 2.0 * math.sin(rho) * (1.0 + 1e-12):
            raise GeometryError(
                f"no such circle: chord {chord:.6g} exceeds diameter {2 * math.sin(rho):.6g}")
        m_hat = s / np.linalg.norm(s)
        w_hat = w / wn
        alpha = 2.0 * math.cos(rho) / float(np.linalg.norm(s))
        beta = math.sqrt(max(0.0, 1.0 - alpha * alpha))
        u = alpha * m_hat + (beta if minor else -beta) * w_hat
        u = _unit(u)

    # counterclockwise angle about u from p to q, in [0, 2pi)
    pp = pv - np.dot(pv, u) * u
    qp = qv - np.dot(qv, u) * u
    sweep = math.atan2(float(np.dot(u, np.cross(pp, qp))), float(np.dot(pp, qp)))
    if sweep <= 0.0:
        sweep += TWO_PI
    if axis is not None:
        minor = sweep <= math.pi
    return Arc(p, q, float(kappa), bool(minor), SpherePoint.of(u), sweep)


def turning_angle(vertex: np.ndarray, t_in: np.ndarray, t_out: np.ndarray) -> float:
    """Signed left turn from tangent ``t_in`` to ``t_out`` at ``vertex``."""
    return math.atan2(float(np.dot(vertex, np.cross(t_in, t_out))), float(np.dot(t_in, t_out)))


def exterior_angle(incoming: Arc, outgoing: Arc) -> float:
    if np.linalg.norm(incoming.end.vec - outgoing.start.vec) > CLOSURE_TOL:
        raise GeometryError("arcs do not share a vertex")
    if incoming.length <= 0.0 or outgoing.length <= 0.0:
        raise GeometryError("tangent undefined on a zero-length arc")
    return turning_angle(outgoing.start.vec, incoming.end_tangent(), outgoing.start_tangent())


@dataclass(frozen=True)
class PolygonBoundary:
    """Closed cycle of arcs with the enclosed region on the left."""

    arcs: tuple[Arc, ...]
    exterior_angles: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        arcs = tuple(self.arcs)
        object.__setattr__(self, "arcs", arcs)
        if not arcs:
            raise GeometryError("empty boundary")
        for a, b in zip(arcs, arcs[1:] + arcs[:1]):
            gap = float(np.linalg.norm(a.end.vec - b.start.vec))
            if gap > CLOSURE_TOL:
                raise GeometryError(f"boundary does not close (gap {gap:.3g})")
        angles = tuple(exterior_angle(a, b) for a, b in zip(arcs, arcs[1:] + arcs[:1]))
        object.__setattr__(self, "exterior_angles", angles)

    @property
    def perimeter(self) -> float:
        return sum(a.length for a in self.arcs)


def polygon_area(boundary: PolygonBoundary | CircleSpec) -> float:
    """Area on the left of a closed boundary, by Gauss-Bonnet."""
    if isinstance(boundary, CircleSpec):
        return TWO_PI - boundary.kappa * boundary.perimeter
    total_curvature = sum(a.kappa * a.length for a in boundary.arcs)
    return TWO_PI - total_curvature - sum(boundary.exterior_angles)


def geodesic_polygon(points: Sequence[SpherePoint]) -> PolygonBoundary:
    """Minor geodesic arcs joining consecutive points, closed."""
    pts = list(points)
    return PolygonBoundary(tuple(
        arc_between(a, b, 0.0) for a, b in zip(pts, pts[1:] + pts[:1])))
