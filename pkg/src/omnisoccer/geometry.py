"""Planar geometry: angles, frames, and segment intersection.

Everything else in the package is built on these primitives. Angles follow
one convention throughout: radians, wrapped to the half-open interval
(-pi, pi]. The robot-local frame is x forward (kicker direction), y left,
right-handed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    """Degenerate or non-finite geometric input."""


def _require_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise GeometryError(f"non-finite coordinate: {v!r}")


def wrap_angle(angle: float) -> float:
    """Wrap an angle in radians to (-pi, pi]."""
    _require_finite(angle)
    wrapped = angle - TWO_PI * math.floor((angle + math.pi) / TWO_PI)
    # floor() puts the result in [-pi, pi); fold the open edge onto +pi.
    if wrapped <= -math.pi:
        return math.pi
    return wrapped


def angle_error(target: float, current: float) -> float:
    """Shortest signed rotation from `current` to `target`, in (-pi, pi]."""
    _require_finite(target, current)
    return wrap_angle(target - current)


@dataclass(frozen=True)
class Vec2:
    """Point or displacement in the field plane, meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        _require_finite(self.x, self.y)

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> "Vec2":
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vec2") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def distance_to(self, other: "Vec2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def normalized(self) -> "Vec2":
        n = self.norm()
        if n == 0.0:
            raise GeometryError("cannot normalize a zero vector")
        return Vec2(self.x / n, self.y / n)


@dataclass(frozen=True)
class Pose2D:
    """Planar pose in the field frame: position in meters, heading in radians.

    The heading is wrapped to (-pi, pi] on construction.
    """

    x: float
    y: float
    theta: float

    def __post_init__(self) -> None:
        _require_finite(self.x, self.y)
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    @property
    def position(self) -> Vec2:
        return Vec2(self.x, self.y)

    def heading_vector(self) -> Vec2:
        return Vec2(math.cos(self.theta), math.sin(self.theta))


def bearing(origin: Vec2, target: Vec2) -> float:
    """Angle of the vector origin->target, in (-pi, pi].

    Robust in all four quadrants and on both axes, unlike atan(dy/dx).
    """
    dx = target.x - origin.x
    dy = target.y - origin.y
    if dx == 0.0 and dy == 0.0:
        raise GeometryError("bearing undefined for coincident points")
    return wrap_angle(math.atan2(dy, dx))


def field_to_robot(pose: Pose2D, point: Vec2) -> Vec2:
    """Express a field-frame point in the robot-local frame of `pose`."""
    dx = point.x - pose.x
    dy = point.y - pose.y
    c = math.cos(pose.theta)
    s = math.sin(pose.theta)
    return Vec2(c * dx + s * dy, -s * dx + c * dy)


def robot_to_field(pose: Pose2D, point: Vec2) -> Vec2:
    """Express a robot-local point of `pose` in the field frame.

    Exact inverse of :func:`field_to_robot`.
    """
    c = math.cos(pose.theta)
    s = math.sin(pose.theta)
    return Vec2(c * point.x - s * point.y + pose.x,
                s * point.x + c * point.y + pose.y)


@dataclass(frozen=True)
class Segment:
    """Closed line segment between two distinct points."""

    a: Vec2
    b: Vec2

    def direction(self) -> Vec2:
        return self.b - self.a

    def length(self) -> float:
        return self.a.distance_to(self.b)


class _CollinearOverlap:
    """Sentinel outcome: segments overlap along a shared line."""

    _instance = None

    def __new__(cls) -> "_CollinearOverlap":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "COLLINEAR_OVERLAP"


COLLINEAR_OVERLAP = _CollinearOverlap()


def segment_intersection(s1: Segment, s2: Segment):
    """Intersect two closed segments.

    Returns the intersection Vec2 when the segments meet in exactly one
    point, None when they are disjoint, and the COLLINEAR_OVERLAP sentinel
    when they share a collinear sub-segment of positive length.
    """
    d1 = s1.direction()
    d2 = s2.direction()
    # squared length must be representable; anything below ~1e-154 m is
    # numerically indistinguishable from a point
    if d1.dot(d1) == 0.0:
        raise GeometryError("degenerate segment s1")
    if d2.dot(d2) == 0.0:
        raise GeometryError("degenerate segment s2")

    denom = d1.cross(d2)
    offset = s2.a - s1.a
    scale = d1.norm() * d2.norm()
    eps = 1e-12 * scale

    if abs(denom) > eps:
        t = offset.cross(d2) / denom
        u = offset.cross(d1) / denom
        tol = 1e-12
        if -tol <= t <= 1.0 + tol and -tol <= u <= 1.0 + tol:
            return s1.a + d1 * min(max(t, 0.0), 1.0)
        return None

    # Parallel. Not collinear -> disjoint. Compare the perpendicular offset
    # of s2.a from the s1 line against a length-scaled tolerance.
    perp = abs(offset.cross(d1)) / d1.norm()
    if perp > 1e-12 * max(offset.norm(), d1.norm(), 1.0):
        return None

    # Collinear: compare parameter intervals along s1.
    len2 = d1.dot(d1)
    ta = offset.dot(d1) / len2
    tb = (s2.b - s1.a).dot(d1) / len2
    lo = max(0.0, min(ta, tb))
    hi = min(1.0, max(ta, tb))
    if hi < lo - 1e-12:
        return None
    if hi - lo <= 1e-12:
        t = min(max((lo + hi) / 2.0, 0.0), 1.0)
        return s1.a + d1 * t
    return COLLINEAR_OVERLAP
