"""Reference behaviors: servoing steps, attacker geometry, goalie intercept.

The step functions are pure (pose in, twist out) and mirror the classroom
progression: face the ball, approach and kick, plan a standoff point
behind the ball facing the goal, extrapolate an attacker's shot line, and
aim at a rolling ball's rest point instead of the ball itself. Behavior
classes wrap the steps into per-frame decision loops that talk to the
controller as ordinary API clients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .ball import BallState, DecelModel, predict_stop
from .geometry import Pose2D, Vec2, angle_error, bearing, field_to_robot, wrap_angle
from .kinematics import Twist, clamp_twist
from .world import DetectionFrame, FieldGeometry


class StrategyError(ValueError):
    """Degenerate strategy geometry."""


@dataclass(frozen=True)
class Gains:
    """Proportional servo gains (1/s)."""

    position: float = 2.0
    orientation: float = 3.0


DEFAULT_GAINS = Gains()


@dataclass(frozen=True)
class GotoTarget:
    """Absolute pose target with completion tolerances."""

    pose: Pose2D
    pos_tol: float = 0.02  # m
    ang_tol: float = math.radians(2.0)

    def __post_init__(self) -> None:
        if self.pos_tol <= 0 or self.ang_tol <= 0:
            raise StrategyError("tolerances must be positive")

    def reached(self, current: Pose2D) -> bool:
        return (
            current.position.distance_to(self.pose.position) <= self.pos_tol
            and abs(angle_error(self.pose.theta, current.theta)) <= self.ang_tol
        )


def goto_step(current: Pose2D, target: GotoTarget, gains: Gains = DEFAULT_GAINS) -> Twist:
    """One proportional-servo step toward an absolute pose.

    The positional error is expressed in the robot frame (that is the
    whole point: commands are chassis speeds), scaled by the gains,
    clamped, and zeroed once inside both tolerances.
    """
    if target.reached(current):
        return Twist(0.0, 0.0, 0.0)
    local_err = field_to_robot(current, target.pose.position)
    omega = gains.orientation * angle_error(target.pose.theta, current.theta)
    return clamp_twist(
        Twist(gains.position * local_err.x, gains.position * local_err.y, omega)
    )


def face_ball_step(robot: Pose2D, ball: Vec2, gain: float = 3.0):
    """Rotate in place toward the ball: omega = gain * wrapped bearing error.

    Returns (twist, valid); valid is False when the ball is coincident
    with the robot, in which case the twist is zero.
    """
    if robot.position.distance_to(ball) < 1e-9:
        return Twist(0.0, 0.0, 0.0), False
    err = angle_error(bearing(robot.position, ball), robot.theta)
    return clamp_twist(Twist(0.0, 0.0, gain * err)), True


@dataclass(frozen=True)
class ApproachParams:
    """Thresholds for the drive-and-kick behavior."""

    align_threshold: float = math.radians(15.0)
    kick_distance: float = 0.09 + 0.021 + 0.02  # robot + ball radius + a margin
    forward_gain: float = 2.0
    orientation_gain: float = 3.0
    kick_impulse: float = 0.005


DEFAULT_APPROACH = ApproachParams()


def approach_and_kick_step(
    robot: Pose2D, ball: Vec2, params: ApproachParams = DEFAULT_APPROACH
):
    """Steer at the ball; drive forward only when roughly aligned; kick in range.

    The rotation servo is always active on the bearing-to-ball expressed
    about the robot origin. Returns (twist, impulse-or-None).
    """
    dist = robot.position.distance_to(ball)
    if dist < 1e-9:
        return Twist(0.0, 0.0, 0.0), None
    err = angle_error(bearing(robot.position, ball), robot.theta)
    omega = params.orientation_gain * err
    aligned = abs(err) < params.align_threshold
    vx = params.forward_gain * dist if aligned else 0.0
    kick = params.kick_impulse if aligned and dist < params.kick_distance else None
    return clamp_twist(Twist(vx, 0.0, omega)), kick


@dataclass(frozen=True)
class AttackPlan:
    """Standoff target: at distance d behind the ball, facing the goal."""

    target: Vec2
    alpha: float
    standoff: float


def attacker_plan(ball: Vec2, goal_center: Vec2, standoff: float) -> AttackPlan:
    """Point at distance `standoff` behind the ball on the ball-goal line."""
    if standoff <= 0:
        raise StrategyError("standoff distance must be positive")
    if ball.distance_to(goal_center) < 1e-9:
        raise StrategyError("ball and goal center coincide")
    u = (goal_center - ball).normalized()
    return AttackPlan(
        target=ball - u * standoff,
        alpha=bearing(ball, goal_center),
        standoff=standoff,
    )


def goalie_intercept(
    attacker: Pose2D, ball: Vec2, field: FieldGeometry
) -> Optional[float]:
    """Where an attacker's shot line meets our goal line at x = +length/2.

    The shot is the line through the ball with the attacker's heading as
    slope: f(x) = a*x + b with a = tan(theta). Attackers facing away
    (|theta| >= pi/2) are ignored; the result is capped inside the goal
    mouth. Mirror the inputs through x = 0 to defend the other side.
    """
    theta = wrap_angle(attacker.theta)
    if not (-math.pi / 2 < theta < math.pi / 2):
        return None
    a = math.tan(theta)
    b = ball.y - a * ball.x
    y = a * field.half_length + b
    half_goal = field.goal_width / 2.0
    return min(max(y, -half_goal), half_goal)


def mirror_pose(pose: Pose2D) -> Pose2D:
    """Reflect a pose through the x = 0 plane."""
    return Pose2D(-pose.x, pose.y, wrap_angle(math.pi - pose.theta))


def moving_ball_target(ball: BallState, model: DecelModel) -> Vec2:
    """Chase target for a rolling ball: its predicted rest point."""
    if ball.at_rest():
        return ball.pos
    return predict_stop(ball, model).pos


# -- per-frame behaviors (API-client side) -------------------------------------


class Behavior:
    """Base: consume a detection frame + game state, produce command dicts.

    Emitted entries are (msg_type, payload) pairs; a client driver wraps
    them into wire messages.
    """

    def __init__(self, team: str, number: int) -> None:
        self.team = team
        self.number = number

    def step(self, frame: DetectionFrame, game_state: dict) -> list:
        raise NotImplementedError

    def _command(self, twist: Twist) -> tuple:
        return (
            "command",
            {
                "team": self.team,
                "number": self.number,
                "vx": twist.vx,
                "vy": twist.vy,
                "omega": twist.omega,
            },
        )

    def _kick(self, impulse: float) -> tuple:
        return ("kick", {"team": self.team, "number": self.number, "impulse": impulse})


class AttackerBehavior(Behavior):
    """Plan a standoff point behind the ball facing the goal, nudge, kick."""

    def __init__(
        self,
        team: str,
        number: int,
        field: FieldGeometry,
        standoff: float = 0.18,
        nudge_duration: float = 0.3,
        kick_range: float = 0.125,  # tuned to the kicker's engagement reach
        use_prediction: bool = False,
        decel: float = 0.25,
        gains: Gains = DEFAULT_GAINS,
    ) -> None:
        super().__init__(team, number)
        self.field = field
        self.standoff = standoff
        self.nudge_duration = nudge_duration
        self.kick_range = kick_range
        self.use_prediction = use_prediction
        self.model = DecelModel(decel)
        self.gains = gains
        self._nudge_until: Optional[float] = None
        self._last_kick_t = -math.inf
        self._prev_ball: Optional[tuple] = None

    def _ball_estimate(self, frame: DetectionFrame) -> Vec2:
        ball = frame.ball
        if not self.use_prediction or self._prev_ball is None:
            return ball
        prev_t, prev_pos = self._prev_ball
        dt = frame.t - prev_t
        if dt <= 0:
            return ball
        vel = Vec2((ball.x - prev_pos.x) / dt, (ball.y - prev_pos.y) / dt)
        if vel.norm() < 0.05:
            return ball
        return moving_ball_target(BallState(ball, vel), self.model)

    def step(self, frame: DetectionFrame, game_state: dict) -> list:
        me = frame.robot(self.team, self.number)
        ball = frame.ball
        if me is None or ball is None:
            return []
        aim_ball = self._ball_estimate(frame)
        self._prev_ball = (frame.t, ball)
        my_side = game_state["sides"][self.team]
        goal_center = self.field.goal_center(-my_side)
        try:
            plan = attacker_plan(aim_ball, goal_center, self.standoff)
        except StrategyError:
            return []

        out = []
        now = frame.t
        dist_to_ball = me.pose.position.distance_to(ball)
        nudging = self._nudge_until is not None and now < self._nudge_until
        at_target = me.pose.position.distance_to(plan.target) < 0.04
        aligned = abs(angle_error(plan.alpha, me.pose.theta)) < math.radians(10.0)

        if nudging:
            out.append(self._command(Twist(0.2, 0.0, 0.0)))
            if dist_to_ball < self.kick_range and now - self._last_kick_t > 1.2:
                self._last_kick_t = now
                out.append(self._kick(0.005))
        elif at_target and aligned:
            self._nudge_until = now + self.nudge_duration
            out.append(self._command(Twist(0.2, 0.0, 0.0)))
        else:
            self._nudge_until = None
            waypoint = self._waypoint(me.pose, ball, plan, goal_center)
            target = GotoTarget(Pose2D(waypoint.x, waypoint.y, plan.alpha), 0.03)
            out.append(self._command(goto_step(me.pose, target, self.gains)))
        return out

    def _waypoint(self, me: Pose2D, ball: Vec2, plan: AttackPlan, goal: Vec2) -> Vec2:
        """Detour sideways when we are on the goal side of the ball, so the
        approach never bulldozes the ball toward our own half."""
        to_goal = (goal - ball).normalized()
        ahead = (me.position - ball).dot(to_goal)
        near = me.position.distance_to(ball) < 2.5 * self.standoff
        if ahead > 0.0 and near:
            perp = Vec2(-to_goal.y, to_goal.x)
            side = 1.0 if (me.position - ball).dot(perp) >= 0 else -1.0
            return ball + perp * (side * 2.0 * self.standoff) - to_goal * self.standoff
        return plan.target


class GoalieBehavior(Behavior):
    """Hold the goal line where the most threatening opponent's shot lands."""

    def __init__(
        self,
        team: str,
        number: int,
        field: FieldGeometry,
        setback: float = 0.10,
        gains: Gains = DEFAULT_GAINS,
    ) -> None:
        super().__init__(team, number)
        self.field = field
        self.setback = setback
        self.gains = gains

    def step(self, frame: DetectionFrame, game_state: dict) -> list:
        me = frame.robot(self.team, self.number)
        ball = frame.ball
        if me is None or ball is None:
            return []
        side = game_state["sides"][self.team]
        opponents = [r for r in frame.robots if r.team != self.team]
        y = None
        if opponents:
            threat = min(
                opponents, key=lambda r: r.pose.position.distance_to(ball)
            )
            if side > 0:
                y = goalie_intercept(threat.pose, ball, self.field)
            else:
                y = goalie_intercept(
                    mirror_pose(threat.pose), Vec2(-ball.x, ball.y), self.field
                )
        if y is None:
            half_goal = self.field.goal_width / 2.0
            y = min(max(ball.y, -half_goal), half_goal)
        x = side * (self.field.half_length - self.setback)
        heading = math.pi if side > 0 else 0.0
        target = GotoTarget(Pose2D(x, y, heading), 0.02)
        return [self._command(goto_step(me.pose, target, self.gains))]


class IdleBehavior(Behavior):
    """Does nothing; useful as a placeholder opponent."""

    def step(self, frame: DetectionFrame, game_state: dict) -> list:
        return []


class ChaserBehavior(Behavior):
    """Drive at the ball (optionally at its predicted rest point) and kick.

    The direct comparison subject for prediction-vs-no-prediction
    interception experiments.
    """

    def __init__(
        self,
        team: str,
        number: int,
        use_prediction: bool = False,
        decel: float = 0.25,
        params: ApproachParams = DEFAULT_APPROACH,
    ) -> None:
        super().__init__(team, number)
        self.use_prediction = use_prediction
        self.model = DecelModel(decel)
        self.params = params
        self._prev_ball: Optional[tuple] = None

    def step(self, frame: DetectionFrame, game_state: dict) -> list:
        me = frame.robot(self.team, self.number)
        ball = frame.ball
        if me is None or ball is None:
            return []
        target = ball
        if self.use_prediction and self._prev_ball is not None:
            prev_t, prev_pos = self._prev_ball
            dt = frame.t - prev_t
            if dt > 0:
                vel = Vec2((ball.x - prev_pos.x) / dt, (ball.y - prev_pos.y) / dt)
                if vel.norm() >= 0.05:
                    target = moving_ball_target(BallState(ball, vel), self.model)
        self._prev_ball = (frame.t, ball)
        twist, kick = approach_and_kick_step(me.pose, target, self.params)
        out = [self._command(twist)]
        if kick is not None and me.pose.position.distance_to(ball) < self.params.kick_distance:
            out.append(self._kick(kick))
        return out


BEHAVIOR_NAMES = ("attacker", "attacker-predict", "goalie", "chaser", "chaser-predict", "idle")


def make_behavior(name: str, team: str, number: int, field: FieldGeometry) -> Behavior:
    """Factory keyed by the CLI's strategy names."""
    if name == "attacker":
        return AttackerBehavior(team, number, field)
    if name == "attacker-predict":
        return AttackerBehavior(team, number, field, use_prediction=True)
    if name == "goalie":
        return GoalieBehavior(team, number, field)
    if name == "chaser":
        return ChaserBehavior(team, number)
    if name == "chaser-predict":
        return ChaserBehavior(team, number, use_prediction=True)
    if name == "idle":
        return IdleBehavior(team, number)
    raise StrategyError(f"unknown strategy {name!r} (choose from {BEHAVIOR_NAMES})")
