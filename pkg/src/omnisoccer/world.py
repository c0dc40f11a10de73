"""Deterministic fixed-step world simulation.

Robots are discs driven by clamped chassis twists, the ball follows the
constant-deceleration model, and collisions are resolved by positional
projection. A detection snapshot can be emitted at the vision rate either
as ground truth, with Gaussian noise, or through the full synthetic
camera + fitted-homography pipeline.

All randomness comes from one seeded generator owned by the world, so an
identical seed plus an identical command/kick timeline reproduces the
trajectory bit for bit.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .ball import BallState, DecelModel, KickMap, step_ball
from .camera import fiducial_correspondences, make_synthetic_camera
from .geometry import Pose2D, Segment, Vec2, bearing, wrap_angle
from .kinematics import ZERO_TWIST, Twist, clamp_twist
from .vision import (
    CalibrationReport,
    Homography,
    ImageGeometry,
    field_to_pixel,
    fit_homography,
    pixel_to_field,
    verify_calibration,
)

TEAMS = ("green", "blue")

DETECTION_MODES = ("none", "gaussian", "pipeline")


class WorldError(ValueError):
    """Invalid simulator input."""


class RobotNotFoundError(WorldError):
    """No robot with the requested team/number."""


class PreemptedError(WorldError):
    """Robot is preempted and cannot be commanded."""


class KickCooldownError(WorldError):
    """Kicker capacitor still recharging."""


class PlacementError(WorldError):
    """Teleport target outside the playable area."""


@dataclass(frozen=True)
class FieldGeometry:
    """Playing field: origin at center, x toward the positive goal.

    Walls (or the out-of-play boundary in borderless mode) sit at the
    field extent plus `margin`; the goal lines are virtual segments on
    x = +-length/2 between the posts.
    """

    length: float = 1.83
    width: float = 1.22
    goal_width: float = 0.60
    margin: float = 0.30

    def __post_init__(self) -> None:
        for name in ("length", "width", "goal_width", "margin"):
            if not (getattr(self, name) > 0.0):
                raise WorldError(f"field {name} must be positive")
        if self.goal_width >= self.width:
            raise WorldError("goal width must be smaller than field width")

    @property
    def half_length(self) -> float:
        return self.length / 2.0

    @property
    def half_width(self) -> float:
        return self.width / 2.0

    def goal_segment(self, side: int) -> Segment:
        """Goal line at x = side * length/2, between the virtual posts."""
        x = side * self.half_length
        return Segment(Vec2(x, -self.goal_width / 2.0), Vec2(x, self.goal_width / 2.0))

    def corners(self) -> tuple:
        return (
            Vec2(-self.half_length, -self.half_width),
            Vec2(self.half_length, -self.half_width),
            Vec2(self.half_length, self.half_width),
            Vec2(-self.half_length, self.half_width),
        )

    def goal_center(self, side: int) -> Vec2:
        return Vec2(side * self.half_length, 0.0)

    def inside(self, p: Vec2, pad: float = 0.0) -> bool:
        return abs(p.x) <= self.half_length + pad and abs(p.y) <= self.half_width + pad


@dataclass(frozen=True)
class SimParams:
    """Everything the simulator needs besides the field itself."""

    physics_rate: int = 240  # Hz
    detection_rate: int = 30  # Hz
    robot_radius: float = 0.09  # m
    ball_radius: float = 0.021  # m, 42 mm diameter ball
    ball_decel: float = 0.25  # m/s^2
    wall_restitution: float = 0.3
    borderless: bool = False  # ball stops at the boundary instead of bouncing
    watchdog: float = 0.5  # s, stale commands decay to zero
    team_size: int = 2
    kick_map: KickMap = field(default_factory=lambda: KickMap(c2=40000.0))
    kick_noise_sigma: float = 0.05  # m/s
    kick_engage_distance: float = 0.04  # m from the robot's front edge
    kick_engage_half_angle: float = math.radians(25.0)
    kick_cooldown: float = 1.0  # s
    detection_mode: str = "gaussian"
    detection_pos_sigma: float = 0.002  # m, ~one pixel at 3 mm/px
    detection_angle_sigma: float = math.radians(0.5)
    detection_ball_dropout: float = 0.0  # probability per frame
    marker_size: float = 0.10  # m, corner fiducial edge

    def __post_init__(self) -> None:
        if self.physics_rate <= 0 or self.detection_rate <= 0:
            raise WorldError("rates must be positive")
        if self.physics_rate % self.detection_rate != 0:
            raise WorldError("physics rate must be a multiple of the detection rate")
        if not 1 <= self.team_size <= 3:
            raise WorldError("team size must be between 1 and 3")
        if self.detection_mode not in DETECTION_MODES:
            raise WorldError(f"unknown detection mode {self.detection_mode!r}")
        for name in ("robot_radius", "ball_radius", "watchdog", "kick_cooldown"):
            if getattr(self, name) < 0:
                raise WorldError(f"{name} must be non-negative")

    @property
    def tick_dt(self) -> float:
        return 1.0 / self.physics_rate

    @property
    def ticks_per_frame(self) -> int:
        return self.physics_rate // self.detection_rate


@dataclass
class RobotState:
    """One robot entity. `uid` is the physical chassis; team/number is the
    marker it currently carries (the halftime swap relabels entities)."""

    uid: int
    team: str
    number: int
    pose: Pose2D
    twist_cmd: Twist = ZERO_TWIST
    cmd_time: float = -math.inf
    preempted: bool = False
    cooldown_until: float = 0.0


class RobotDetection(NamedTuple):
    team: str
    number: int
    pose: Pose2D


@dataclass(frozen=True)
class DetectionFrame:
    """What clients see: field-frame poses in meters/radians at one instant."""

    t: float
    frame_number: int
    robots: tuple
    ball: Optional[Vec2]
    calibration_ok: bool = True

    def robot(self, team: str, number: int) -> Optional[RobotDetection]:
        for r in self.robots:
            if r.team == team and r.number == number:
                return r
        return None


class KickResult(NamedTuple):
    contact: bool
    clipped: bool
    speed: float  # m/s actually imparted (0 when no contact)


class World:
    """Ground-truth simulation state plus the synthetic vision front end."""

    def __init__(
        self,
        field_geometry: FieldGeometry = FieldGeometry(),
        params: SimParams = SimParams(),
        seed: int = 0,
    ) -> None:
        self.field = field_geometry
        self.params = params
        self.seed = seed
        self.rng = random.Random(seed)
        self.tick = 0
        self.time = 0.0
        self.ball = BallState(Vec2(0.0, 0.0), Vec2(0.0, 0.0))
        self._decel = DecelModel(params.ball_decel)
        self.robots = []
        uid = 0
        for team_index, team in enumerate(TEAMS):
            side = -1.0 if team_index == 0 else 1.0
            for number in range(1, params.team_size + 1):
                y = (number - (params.team_size + 1) / 2.0) * 0.35
                pose = Pose2D(side * field_geometry.length / 4.0, y,
                              0.0 if side < 0 else math.pi)
                self.robots.append(RobotState(uid=uid, team=team, number=number, pose=pose))
                uid += 1

        self.camera: Optional[Homography] = None
        self.fitted_homography: Optional[Homography] = None
        self.calibration: Optional[CalibrationReport] = None
        self._image = ImageGeometry()
        if params.detection_mode == "pipeline":
            self._setup_pipeline()

    def _setup_pipeline(self) -> None:
        self.camera = make_synthetic_camera(self._image)
        corrs = fiducial_correspondences(
            self.camera,
            self.field.length,
            self.field.width,
            marker_size=self.params.marker_size,
            quantize=True,
        )
        self.fitted_homography = fit_homography(corrs)
        self.calibration = verify_calibration(
            self.fitted_homography,
            corrs,
            field_corners=self.field.corners(),
            image=self._image,
        )

    # -- lookup ----------------------------------------------------------

    def robot(self, team: str, number: int) -> RobotState:
        for r in self.robots:
            if r.team == team and r.number == number:
                return r
        raise RobotNotFoundError(f"no robot {team}/{number}")

    def has_robot(self, team: str, number: int) -> bool:
        return any(r.team == team and r.number == number for r in self.robots)

    # -- commands ---------------------------------------------------------

    def command_robot(self, team: str, number: int, twist: Twist) -> None:
        """Replace a robot's commanded twist (latest wins)."""
        robot = self.robot(team, number)
        if robot.preempted:
            raise PreemptedError(f"robot {team}/{number} is preempted")
        if twist.frame != "robot":
            raise WorldError("chassis commands must be in the robot frame")
        robot.twist_cmd = twist
        robot.cmd_time = self.time

    def kick(self, team: str, number: int, impulse: float) -> KickResult:
        """Fire the kicker; the ball is launched only when engaged in front."""
        robot = self.robot(team, number)
        if not math.isfinite(impulse) or impulse < 0.0:
            raise WorldError(f"invalid kick impulse {impulse!r}")
        if self.time < robot.cooldown_until:
            raise KickCooldownError(
                f"kicker ready at t={robot.cooldown_until:.3f}, now {self.time:.3f}"
            )
        clipped = impulse > self.params.kick_map.cap
        if clipped:
            impulse = self.params.kick_map.cap
        robot.cooldown_until = self.time + self.params.kick_cooldown

        to_ball = self.ball.pos - robot.pose.position
        gap = to_ball.norm() - self.params.robot_radius
        engaged = gap <= self.params.kick_engage_distance
        if engaged and to_ball.norm() > 1e-9:
            heading_err = wrap_angle(
                bearing(robot.pose.position, self.ball.pos) - robot.pose.theta
            )
            engaged = abs(heading_err) <= self.params.kick_engage_half_angle
        if not engaged:
            return KickResult(contact=False, clipped=clipped, speed=0.0)

        speed = self.params.kick_map.speed(impulse)
        if self.params.kick_noise_sigma > 0.0:
            speed += self.rng.gauss(0.0, self.params.kick_noise_sigma)
        speed = max(0.0, speed)
        direction = robot.pose.heading_vector()
        self.ball = BallState(self.ball.pos, direction * speed)
        return KickResult(contact=True, clipped=clipped, speed=speed)

    def teleport_robot(self, team: str, number: int, pose: Pose2D) -> bool:
        """Place a robot exactly; returns True if collision resolution moved it."""
        if not self.field.inside(pose.position, self.field.margin):
            raise PlacementError(f"pose {pose} outside field + margin")
        robot = self.robot(team, number)
        robot.pose = pose
        robot.twist_cmd = ZERO_TWIST
        robot.cmd_time = -math.inf
        self._resolve_collisions()
        return robot.pose != pose

    def teleport_ball(self, pos: Vec2) -> None:
        if not self.field.inside(pos, self.field.margin):
            raise PlacementError(f"ball position {pos} outside field + margin")
        self.ball = BallState(pos, Vec2(0.0, 0.0))
        self._resolve_collisions()

    def set_preempted(self, team: str, number: int, value: bool) -> None:
        self.robot(team, number).preempted = value

    def swap_team_labels(self) -> None:
        """Halftime marker swap: every entity changes color, keeps its number."""
        for r in self.robots:
            r.team = TEAMS[1] if r.team == TEAMS[0] else TEAMS[0]
        self.robots.sort(key=lambda r: (TEAMS.index(r.team), r.number))

    # -- stepping ---------------------------------------------------------

    def effective_twist(self, robot: RobotState) -> Twist:
        if robot.preempted:
            return ZERO_TWIST
        if self.time - robot.cmd_time > self.params.watchdog:
            return ZERO_TWIST
        return clamp_twist(robot.twist_cmd)

    def step(self, dt: Optional[float] = None) -> None:
        """Advance one physics tick (default 1/physics_rate seconds)."""
        if dt is None:
            dt = self.params.tick_dt
        if not (dt > 0.0):
            raise WorldError("dt must be positive")

        for robot in self.robots:
            tw = self.effective_twist(robot)
            if tw.is_zero():
                continue
            theta = robot.pose.theta
            c, s = math.cos(theta), math.sin(theta)
            robot.pose = Pose2D(
                robot.pose.x + (c * tw.vx - s * tw.vy) * dt,
                robot.pose.y + (s * tw.vx + c * tw.vy) * dt,
                theta + tw.omega * dt,
            )

        if not self.ball.at_rest():
            self.ball = step_ball(self.ball, self._decel, dt)

        self._resolve_collisions()
        self._apply_walls()
        self.tick += 1
        self.time += dt

    def run(self, duration: float) -> None:
        """Step whole ticks covering `duration` seconds."""
        n = int(round(duration * self.params.physics_rate))
        for _ in range(n):
            self.step()

    def _resolve_collisions(self) -> None:
        """Positional projection: no disc pair may interpenetrate."""
        r_robot = self.params.robot_radius
        r_ball = self.params.ball_radius
        for _ in range(8):
            moved = False
            for i in range(len(self.robots)):
                for j in range(i + 1, len(self.robots)):
                    a, b = self.robots[i], self.robots[j]
                    delta = b.pose.position - a.pose.position
                    dist = delta.norm()
                    overlap = 2.0 * r_robot - dist
                    if overlap <= 0.0:
                        continue
                    moved = True
                    if dist < 1e-9:
                        # coincident centers: split along x deterministically
                        delta, dist = Vec2(1.0, 0.0), 1.0
                    push = delta * (overlap / (2.0 * dist))
                    a.pose = Pose2D(a.pose.x - push.x, a.pose.y - push.y, a.pose.theta)
                    b.pose = Pose2D(b.pose.x + push.x, b.pose.y + push.y, b.pose.theta)
            for robot in self.robots:
                delta = self.ball.pos - robot.pose.position
                dist = delta.norm()
                overlap = (r_robot + r_ball) - dist
                if overlap <= 0.0:
                    continue
                moved = True
                if dist < 1e-9:
                    delta, dist = robot.pose.heading_vector(), 1.0
                normal = delta * (1.0 / dist)
                new_pos = self.ball.pos + normal * overlap
                vel = self.ball.vel
                inward = vel.dot(normal)
                if inward < 0.0:
                    # kill the inward component: inelastic contact with the shell
                    vel = vel - normal * inward
                self.ball = BallState(new_pos, vel)
            if not moved:
                break

    def _apply_walls(self) -> None:
        bound_x = self.field.half_length + self.field.margin
        bound_y = self.field.half_width + self.field.margin
        r = self.params.ball_radius
        px, py = self.ball.pos.x, self.ball.pos.y
        vx, vy = self.ball.vel.x, self.ball.vel.y
        hit = False
        if px < -bound_x + r:
            px, vx, hit = -bound_x + r, abs(vx), True
        elif px > bound_x - r:
            px, vx, hit = bound_x - r, -abs(vx), True
        if py < -bound_y + r:
            py, vy, hit = -bound_y + r, abs(vy), True
        elif py > bound_y - r:
            py, vy, hit = bound_y - r, -abs(vy), True
        if hit:
            if self.params.borderless:
                self.ball = BallState(Vec2(px, py), Vec2(0.0, 0.0))
            else:
                k = self.params.wall_restitution
                self.ball = BallState(Vec2(px, py), Vec2(vx * k, vy * k))

        rr = self.params.robot_radius
        for robot in self.robots:
            cx = min(max(robot.pose.x, -bound_x + rr), bound_x - rr)
            cy = min(max(robot.pose.y, -bound_y + rr), bound_y - rr)
            if cx != robot.pose.x or cy != robot.pose.y:
                robot.pose = Pose2D(cx, cy, robot.pose.theta)

    # -- detection --------------------------------------------------------

    def emit_detection(self, frame_number: int) -> DetectionFrame:
        """Snapshot the world as the vision system would report it."""
        mode = self.params.detection_mode
        robots = []
        for r in self.robots:
            robots.append(RobotDetection(r.team, r.number, self._observe_pose(r.pose, mode)))
        ball: Optional[Vec2] = self._observe_point(self.ball.pos, mode)
        if self.params.detection_ball_dropout > 0.0:
            if self.rng.random() < self.params.detection_ball_dropout:
                ball = None
        calibration_ok = True if self.calibration is None else self.calibration.passed
        return DetectionFrame(
            t=self.time,
            frame_number=frame_number,
            robots=tuple(robots),
            ball=ball,
            calibration_ok=calibration_ok,
        )

    def _observe_point(self, p: Vec2, mode: str) -> Vec2:
        if mode == "gaussian":
            s = self.params.detection_pos_sigma
            if s > 0.0:
                return Vec2(p.x + self.rng.gauss(0.0, s), p.y + self.rng.gauss(0.0, s))
            return p
        if mode == "pipeline":
            u, v = field_to_pixel(self.camera, p)
            return pixel_to_field(self.fitted_homography, round(u), round(v))
        return p

    def _observe_pose(self, pose: Pose2D, mode: str) -> Pose2D:
        if mode == "gaussian":
            sp = self.params.detection_pos_sigma
            sa = self.params.detection_angle_sigma
            return Pose2D(
                pose.x + (self.rng.gauss(0.0, sp) if sp > 0 else 0.0),
                pose.y + (self.rng.gauss(0.0, sp) if sp > 0 else 0.0),
                pose.theta + (self.rng.gauss(0.0, sa) if sa > 0 else 0.0),
            )
        if mode == "pipeline":
            center = self._observe_point(pose.position, mode)
            front_truth = pose.position + pose.heading_vector() * self.params.robot_radius
            front = self._observe_point(front_truth, mode)
            if center.distance_to(front) < 1e-9:
                return Pose2D(center.x, center.y, pose.theta)
            return Pose2D(center.x, center.y, bearing(center, front))
        return pose

    # -- determinism helpers ----------------------------------------------

    def state_digest(self) -> tuple:
        """Exact value snapshot for bit-level determinism comparisons."""
        return (
            self.tick,
            self.time,
            tuple(
                (r.uid, r.team, r.number, r.pose.x, r.pose.y, r.pose.theta,
                 r.twist_cmd.vx, r.twist_cmd.vy, r.twist_cmd.omega,
                 r.preempted, r.cooldown_until)
                for r in self.robots
            ),
            (self.ball.pos.x, self.ball.pos.y, self.ball.vel.x, self.ball.vel.y),
        )
