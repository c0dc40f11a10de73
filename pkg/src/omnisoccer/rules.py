"""Competition rule engine.

Match phases, team keys, preemption, the ball-hold penalty, goal
detection by line crossing, kickoff placement and the halftime swap.
The engine consumes only detection frames plus referee inputs, so
replaying a log reproduces the exact same GameState evolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .geometry import COLLINEAR_OVERLAP, Segment, Vec2, segment_intersection
from .world import TEAMS, DetectionFrame, FieldGeometry

PHASES = ("idle", "placement", "running", "halftime", "finished")


class RulesError(ValueError):
    """Invalid rule-engine input."""


class PhaseError(RulesError):
    """Operation not allowed in the current match phase."""


class AuthError(RulesError):
    """Unknown key."""


@dataclass(frozen=True)
class RuleParams:
    """Tunable rule constants; all durations in seconds, distances in meters."""

    hold_radius: float = 0.25
    hold_limit: float = 5.0
    hold_grace: float = 0.5
    penalty_duration: float = 5.0
    half_duration: float = 300.0
    goal_rearm_margin: float = 0.10
    kickoff_back: float = 0.30

    def __post_init__(self) -> None:
        for name in (
            "hold_radius",
            "hold_limit",
            "hold_grace",
            "penalty_duration",
            "half_duration",
            "goal_rearm_margin",
            "kickoff_back",
        ):
            if not (getattr(self, name) > 0.0):
                raise RulesError(f"rule parameter {name} must be positive")


@dataclass(frozen=True)
class TeamKey:
    """Secret authorizing control of one team's robots."""

    key: str
    team: str

    def __post_init__(self) -> None:
        if self.team not in TEAMS:
            raise RulesError(f"unknown team {self.team!r}")
        if not self.key:
            raise RulesError("empty key")


@dataclass(frozen=True)
class GoalEvent:
    team: str
    t: float
    point: Vec2


@dataclass(frozen=True)
class PenaltyEvent:
    team: str
    number: int
    t: float
    duration: float
    reason: str = "ball_hold"


class GoalCrossing(NamedTuple):
    side: int  # +1 or -1: which goal line was crossed
    point: Vec2


def check_goal(
    prev_ball: Vec2, ball: Vec2, field: FieldGeometry
) -> Optional[GoalCrossing]:
    """Outward crossing of a goal line strictly between the posts, if any.

    Pure geometry; hysteresis and scoring-team attribution live in the
    engine. A collinear slide along the goal line counts as a crossing.
    """
    if prev_ball == ball:
        return None
    motion = Segment(prev_ball, ball)
    for side in (-1, 1):
        goal_line = field.goal_segment(side)
        hit = segment_intersection(motion, goal_line)
        if hit is None:
            continue
        if hit is COLLINEAR_OVERLAP:
            mid = Vec2((prev_ball.x + ball.x) / 2.0, (prev_ball.y + ball.y) / 2.0)
            if abs(mid.y) < field.goal_width / 2.0:
                return GoalCrossing(side, mid)
            continue
        if abs(hit.y) >= field.goal_width / 2.0:
            continue  # on or outside a post
        outward = (ball.x - prev_ball.x) * side > 0.0
        if outward:
            return GoalCrossing(side, hit)
    return None


class RuleEngine:
    """Owns the GameState and evaluates rules one detection frame at a time."""

    def __init__(
        self,
        field: FieldGeometry,
        params: RuleParams,
        team_keys: dict,
        referee_key: str,
        team_size: int = 2,
    ) -> None:
        keys = [team_keys[t] for t in TEAMS] + [referee_key]
        if len(set(keys)) != len(keys) or not all(keys):
            raise RulesError("team and referee keys must be distinct and non-empty")
        self.field = field
        self.params = params
        self.team_keys = {t: TeamKey(team_keys[t], t) for t in TEAMS}
        self.referee_key = referee_key
        self.team_size = team_size

        self.phase = "idle"
        self.score = {t: 0 for t in TEAMS}
        self.clock = 0.0
        self.half = 1
        self.sides = {TEAMS[0]: -1, TEAMS[1]: 1}
        self.hold_timers = {}
        self.hold_out_since = {}
        self.penalties = {}
        self.ref_preempts = set()
        self.goal_armed = True
        self.goal_pending = False
        self.prev_ball: Optional[Vec2] = None

    # -- authorization -----------------------------------------------------

    def key_role(self, key: str) -> Optional[str]:
        """Team name, 'referee', or None for an unknown key."""
        if key == self.referee_key:
            return "referee"
        for team, tk in self.team_keys.items():
            if tk.key == key:
                return team
        return None

    def is_blocked(self, team: str, number: int) -> bool:
        ident = (team, number)
        return ident in self.ref_preempts or ident in self.penalties

    def controllable(self, team: str, number: int) -> bool:
        return self.phase == "running" and not self.is_blocked(team, number)

    def authorize(self, key: str, team: str, number: int) -> bool:
        """True iff `key` binds to `team` and the robot is not blocked."""
        role = self.key_role(key)
        if role is None:
            raise AuthError("unknown key")
        return role == team and not self.is_blocked(team, number)

    def _check_robot(self, team: str, number: int) -> None:
        if team not in TEAMS or not 1 <= number <= self.team_size:
            raise RulesError(f"no robot {team}/{number}")

    # -- per-frame evaluation ------------------------------------------------

    def on_detection(self, frame: DetectionFrame, dt: float) -> list:
        """Advance clocks, penalties, ball-hold and goal detection by one frame."""
        events = []
        running = self.phase == "running"
        if running:
            self.clock += dt
            for ident in list(self.penalties):
                self.penalties[ident] -= dt
                if self.penalties[ident] <= 1e-9:
                    del self.penalties[ident]

        ball = frame.ball
        if ball is not None:
            if running and self.goal_armed and self.prev_ball is not None:
                crossing = check_goal(self.prev_ball, ball, self.field)
                if crossing is not None:
                    scorer = next(
                        t for t in TEAMS if self.sides[t] != crossing.side
                    )
                    self.score[scorer] += 1
                    self.goal_armed = False
                    self.goal_pending = True
                    events.append(GoalEvent(scorer, frame.t, crossing.point))
            if not self.goal_armed and self._well_inside(ball):
                self.goal_armed = True
            self.prev_ball = ball

            if running:
                events.extend(self._update_ball_hold(frame, ball, dt))
        return events

    def _well_inside(self, ball: Vec2) -> bool:
        return (
            abs(ball.x) <= self.field.half_length - self.params.goal_rearm_margin
            and abs(ball.y) <= self.field.half_width
        )

    def _update_ball_hold(self, frame: DetectionFrame, ball: Vec2, dt: float) -> list:
        events = []
        for det in frame.robots:
            ident = (det.team, det.number)
            if ident in self.penalties:
                # a stopped, penalized robot cannot re-offend
                self.hold_timers[ident] = 0.0
                self.hold_out_since[ident] = None
                continue
            dist = det.pose.position.distance_to(ball)
            if dist <= self.params.hold_radius:
                self.hold_timers[ident] = self.hold_timers.get(ident, 0.0) + dt
                self.hold_out_since[ident] = None
            else:
                out_since = self.hold_out_since.get(ident)
                if out_since is None:
                    self.hold_out_since[ident] = frame.t
                elif frame.t - out_since >= self.params.hold_grace:
                    self.hold_timers[ident] = 0.0
            if self.hold_timers.get(ident, 0.0) >= self.params.hold_limit - 1e-9:
                self.hold_timers[ident] = 0.0
                self.hold_out_since[ident] = None
                self.penalties[ident] = self.params.penalty_duration
                events.append(
                    PenaltyEvent(det.team, det.number, frame.t, self.params.penalty_duration)
                )
        return events

    # -- referee operations ----------------------------------------------------

    def start_engagement(self) -> dict:
        """Enter placement and return the kickoff poses (plus ball at center).

        Allowed from idle, halftime, or right after a goal.
        """
        if not (self.phase in ("idle", "halftime") or self.goal_pending):
            raise PhaseError(f"cannot start engagement during {self.phase}")
        self.phase = "placement"
        self.goal_pending = False
        self.goal_armed = True
        self.prev_ball = None
        self.hold_timers.clear()
        self.hold_out_since.clear()
        return self.kickoff_placements()

    def kickoff_placements(self) -> dict:
        """Kickoff formation per marker: attacker behind center, keeper on the line."""
        placements = {}
        for team in TEAMS:
            s = self.sides[team]
            heading = 0.0 if s < 0 else math.pi
            spots = [
                (s * self.params.kickoff_back, 0.0),
                (s * self.field.half_length, 0.0),
                (s * self.field.half_length * 0.55, 0.30),
            ]
            for number in range(1, self.team_size + 1):
                x, y = spots[(number - 1) % len(spots)]
                placements[(team, number)] = (x, y, heading)
        return placements

    def run(self) -> None:
        if self.phase != "placement":
            raise PhaseError(f"cannot run from {self.phase}")
        self.phase = "running"

    def halftime(self) -> None:
        if self.phase != "running":
            raise PhaseError(f"cannot call halftime from {self.phase}")
        self.phase = "halftime"
        self.half += 1
        self.clock = 0.0

    def halftime_swap(self) -> None:
        """Swap marker/team bindings: sides flip, keys keep their color."""
        if self.phase != "halftime":
            raise PhaseError("swap only allowed at halftime")
        self.sides = {t: -s for t, s in self.sides.items()}
        self.hold_timers.clear()
        self.hold_out_since.clear()

    def referee_preempt(self, team: str, number: int, on: bool) -> None:
        self._check_robot(team, number)
        if on:
            self.ref_preempts.add((team, number))
        else:
            self.ref_preempts.discard((team, number))

    def end(self) -> None:
        self.phase = "finished"

    # -- snapshots ---------------------------------------------------------

    def snapshot(self) -> dict:
        """JSON-ready GameState mirror broadcast to clients each frame."""
        return {
            "phase": self.phase,
            "score": {t: self.score[t] for t in TEAMS},
            "clock": self.clock,
            "half": self.half,
            "sides": {t: self.sides[t] for t in TEAMS},
            "goal_pending": self.goal_pending,
            "penalties": sorted(
                [[t, n, rem] for (t, n), rem in self.penalties.items()]
            ),
            "preempted": sorted([[t, n] for (t, n) in self.ref_preempts]),
            "hold": sorted(
                [[t, n, v] for (t, n), v in self.hold_timers.items() if v > 0.0]
            ),
        }
