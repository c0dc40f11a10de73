"""Omnidirectional chassis kinematics and speed-limit clamping.

Wheel i, mounted at angle alpha_i on a chassis of radius R with wheel
radius r, spins at

    w_i = (-sin(alpha_i) * vx + cos(alpha_i) * vy + R * omega) / r

for a robot-frame twist (vx, vy, omega). The forward map is the
least-squares inverse. Speed limits (0.20 m/s translation, pi rad/s
rotation) live here so the simulated firmware and client-side sanity
checks share one source of truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

V_MAX = 0.20  # m/s, translation cap
W_MAX = math.pi  # rad/s, rotation cap (180 deg/s)

WheelSpeeds = tuple  # one angular speed (rad/s) per wheel


class KinematicsError(ValueError):
    """Invalid layout, frame mismatch, or non-finite twist."""


@dataclass(frozen=True)
class Twist:
    """Planar chassis velocity: two translation components and a spin rate.

    `frame` tags whether the components are expressed in the robot-local
    frame (x forward, y left) or the field frame.
    """

    vx: float
    vy: float
    omega: float
    frame: str = "robot"

    def __post_init__(self) -> None:
        for v in (self.vx, self.vy, self.omega):
            if not math.isfinite(v):
                raise KinematicsError(f"non-finite twist component: {v!r}")
        if self.frame not in ("robot", "field"):
            raise KinematicsError(f"unknown frame tag: {self.frame!r}")

    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)

    def is_zero(self) -> bool:
        return self.vx == 0.0 and self.vy == 0.0 and self.omega == 0.0


ZERO_TWIST = Twist(0.0, 0.0, 0.0)

# minimal holonomic layout: three wheels, evenly spread
DEFAULT_MOUNT_ANGLES = (math.radians(90.0), math.radians(210.0), math.radians(330.0))


@dataclass(frozen=True)
class WheelLayout:
    """Omni-wheel geometry: mount angles plus chassis and wheel radii."""

    mount_angles: tuple = DEFAULT_MOUNT_ANGLES
    chassis_radius: float = 0.06
    wheel_radius: float = 0.025
    _matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        angles = tuple(float(a) for a in self.mount_angles)
        if len(angles) < 3:
            raise KinematicsError("need at least 3 wheels for a holonomic base")
        for i, a in enumerate(angles):
            for b in angles[i + 1 :]:
                if abs(math.remainder(a - b, 2.0 * math.pi)) < 1e-9:
                    raise KinematicsError("mount angles must be pairwise distinct")
        if self.chassis_radius <= 0.0 or self.wheel_radius <= 0.0:
            raise KinematicsError("radii must be positive")
        object.__setattr__(self, "mount_angles", angles)
        m = np.array(
            [
                [-math.sin(a), math.cos(a), self.chassis_radius]
                for a in angles
            ]
        ) / self.wheel_radius
        if np.linalg.matrix_rank(m) < 3:
            raise KinematicsError("degenerate layout: twist not recoverable")
        m.setflags(write=False)
        object.__setattr__(self, "_matrix", m)

    @property
    def wheel_count(self) -> int:
        return len(self.mount_angles)

    def matrix(self) -> np.ndarray:
        """Rows map a robot-frame twist (vx, vy, omega) to wheel speeds."""
        return self._matrix


def inverse_kinematics(layout: WheelLayout, twist: Twist) -> WheelSpeeds:
    """Wheel speeds realizing a robot-frame twist."""
    if twist.frame != "robot":
        raise KinematicsError("inverse kinematics needs a robot-frame twist")
    speeds = layout.matrix() @ np.array([twist.vx, twist.vy, twist.omega])
    return tuple(float(s) for s in speeds)


def forward_kinematics(layout: WheelLayout, speeds: WheelSpeeds) -> Twist:
    """Least-squares robot-frame twist from wheel speeds.

    Exact when the speeds are consistent with the layout.
    """
    if len(speeds) != layout.wheel_count:
        raise KinematicsError(
            f"expected {layout.wheel_count} wheel speeds, got {len(speeds)}"
        )
    sol, *_ = np.linalg.lstsq(layout.matrix(), np.asarray(speeds, dtype=float), rcond=None)
    return Twist(float(sol[0]), float(sol[1]), float(sol[2]), frame="robot")


def clamp_twist(twist: Twist, v_max: float = V_MAX, w_max: float = W_MAX) -> Twist:
    """Scale translation onto the speed cap (direction preserved) and clip spin."""
    vx, vy = twist.vx, twist.vy
    speed = math.hypot(vx, vy)
    # 1-ulp slack keeps the operation exactly idempotent after rescaling
    if speed > v_max * (1.0 + 1e-12):
        k = v_max / speed
        vx *= k
        vy *= k
    omega = min(max(twist.omega, -w_max), w_max)
    if vx == twist.vx and vy == twist.vy and omega == twist.omega:
        return twist
    return Twist(vx, vy, omega, frame=twist.frame)
