"""The Game Controller core: session routing, rules, and the frame loop.

The controller is synchronous and owns all mutable state. Inbound
messages are queued raw and processed in order at frame boundaries
(referee messages first); physics then advances a whole detection
period; the resulting frame drives the rule engine; outputs are fanned
out to per-session outboxes and appended to the replay log. Given the
same seed and the same per-boundary message timeline, two runs produce
bit-identical state and logs. Transports (WebSocket server, in-process
loopback) live elsewhere and only call `connect`/`submit`/`advance_frame`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from typing import Optional

from .config import RunConfig, config_to_header
from .geometry import Pose2D, Vec2
from .kinematics import Twist
from .protocol import (
    PROTOCOL_VERSION,
    ProtocolError,
    WireMessage,
    decode,
    detection_payload,
)
from .replay import ReplayWriter
from .rules import GoalEvent, PenaltyEvent, PhaseError, RuleEngine, RulesError
from .world import (
    DetectionFrame,
    KickCooldownError,
    PlacementError,
    RobotNotFoundError,
    WorldError,
)

SPECTATOR = "spectator"


@dataclass
class Session:
    """One connected client: its role and pending outbound messages."""

    sid: int
    name: str
    role: str = SPECTATOR  # green | blue | referee | spectator
    outbox: list = dataclass_field(default_factory=list)

    @property
    def is_referee(self) -> bool:
        return self.role == "referee"


class GameController:
    def __init__(self, config: RunConfig, replay_path=None) -> None:
        for name in ("green", "blue", "referee"):
            if not config.keys.get(name):
                raise ValueError(
                    f"missing {name} key; call RunConfig.with_generated_keys()"
                )
        self.config = config
        self.world = config.make_world()
        self.engine = RuleEngine(
            config.field,
            config.rules,
            {"green": config.keys["green"], "blue": config.keys["blue"]},
            config.keys["referee"],
            team_size=config.sim.team_size,
        )
        self.frame_dt = 1.0 / config.sim.detection_rate
        self.frame_number = 0
        self.sessions: dict = {}
        self._next_sid = 1
        self._mailbox: list = []
        self._out_seq = 0
        self._rate_tokens: dict = {}
        self._rate_cap = max(1.0, config.command_rate_limit * 0.1)
        self.replay: Optional[ReplayWriter] = None
        if replay_path is not None:
            self.replay = ReplayWriter(replay_path, config_to_header(config))
        self._sync_preemption()

    # -- transport surface ---------------------------------------------------

    def connect(self, name: Optional[str] = None) -> int:
        sid = self._next_sid
        self._next_sid += 1
        session = Session(sid=sid, name=name or f"client-{sid}")
        self.sessions[sid] = session
        self._send(
            session,
            "hello",
            {
                "version": PROTOCOL_VERSION,
                "team_size": self.config.sim.team_size,
                "field": {
                    "length": self.config.field.length,
                    "width": self.config.field.width,
                    "goal_width": self.config.field.goal_width,
                    "margin": self.config.field.margin,
                },
                "rates": {
                    "detection_hz": self.config.sim.detection_rate,
                    "physics_hz": self.config.sim.physics_rate,
                },
            },
        )
        return sid

    def disconnect(self, sid: int) -> None:
        self.sessions.pop(sid, None)

    def submit(self, sid: int, raw: str) -> None:
        """Queue one raw wire message; processed at the next frame boundary."""
        self._mailbox.append((sid, raw))

    def drain_outbox(self, sid: int) -> list:
        session = self.sessions.get(sid)
        if session is None:
            return []
        out, session.outbox = session.outbox, []
        return out

    # -- the frame loop --------------------------------------------------------

    def advance_frame(self) -> DetectionFrame:
        """One detection period: inbound, physics, detection, rules, broadcast."""
        self._process_mailbox()
        for _ in range(self.config.sim.ticks_per_frame):
            self.world.step()
        self.frame_number += 1
        frame = self.world.emit_detection(self.frame_number)
        events = self.engine.on_detection(frame, self.frame_dt)
        self._sync_preemption()
        self._broadcast("detection", detection_payload(frame))
        for event in events:
            if isinstance(event, GoalEvent):
                self._broadcast(
                    "goal",
                    {
                        "team": event.team,
                        "t": event.t,
                        "x": event.point.x,
                        "y": event.point.y,
                    },
                )
            elif isinstance(event, PenaltyEvent):
                self._broadcast(
                    "penalty",
                    {
                        "team": event.team,
                        "number": event.number,
                        "duration": event.duration,
                        "reason": event.reason,
                    },
                )
        self._broadcast("game_state", self.engine.snapshot())
        return frame

    def run_frames(self, count: int) -> None:
        for _ in range(count):
            self.advance_frame()

    @property
    def time(self) -> float:
        return self.world.time

    def close(self) -> None:
        if self.replay is not None:
            self.replay.close()
            self.replay = None

    # -- inbound processing ------------------------------------------------------

    def _process_mailbox(self) -> None:
        for ident in self._rate_tokens:
            self._rate_tokens[ident] = min(
                self._rate_cap,
                self._rate_tokens[ident]
                + self.config.command_rate_limit * self.frame_dt,
            )
        pending, self._mailbox = self._mailbox, []
        decoded = []
        for sid, raw in pending:
            session = self.sessions.get(sid)
            if session is None:
                continue  # disconnected before the boundary
            try:
                msg = decode(raw)
            except ProtocolError as exc:
                self._nack(session, 0, "protocol", str(exc))
                continue
            decoded.append((session, msg))
        # referee actions win any same-boundary race with client commands
        ordered = [e for e in decoded if self._is_referee_msg(e)] + [
            e for e in decoded if not self._is_referee_msg(e)
        ]
        for session, msg in ordered:
            self._apply(session, msg)

    @staticmethod
    def _is_referee_msg(entry) -> bool:
        session, msg = entry
        return msg.type == "referee" and session.is_referee

    def _apply(self, session: Session, msg: WireMessage) -> None:
        if msg.type == "auth":
            self._apply_auth(session, msg)
        elif msg.type == "command":
            self._apply_command(session, msg)
        elif msg.type == "kick":
            self._apply_kick(session, msg)
        elif msg.type == "referee":
            self._apply_referee(session, msg)
        else:
            self._nack(session, msg.seq, "protocol", f"clients cannot send {msg.type}")

    def _apply_auth(self, session: Session, msg: WireMessage) -> None:
        role = self.engine.key_role(msg.data["key"])
        info = {}
        if role is None:
            session.role = SPECTATOR
            info["note"] = "unknown key: downgraded to spectator"
        else:
            session.role = role
        self._log_in(session, msg)
        self._ack(session, msg.seq, {"team": session.role, **info})

    def _check_robot_addr(self, session: Session, msg: WireMessage) -> Optional[tuple]:
        team = msg.data["team"]
        number = msg.data["number"]
        if not self.world.has_robot(team, number):
            self._nack(session, msg.seq, "not_found", f"no robot {team}/{number}")
            return None
        if session.role != team:
            self._nack(session, msg.seq, "unauthorized", f"session is {session.role}")
            return None
        if self.engine.phase != "running":
            self._nack(session, msg.seq, "phase", f"phase is {self.engine.phase}")
            return None
        if self.engine.is_blocked(team, number):
            self._nack(session, msg.seq, "preempted", "robot is preempted or penalized")
            return None
        return team, number

    def _apply_command(self, session: Session, msg: WireMessage) -> None:
        addr = self._check_robot_addr(session, msg)
        if addr is None:
            return
        team, number = addr
        d = msg.data
        if not all(math.isfinite(d[k]) for k in ("vx", "vy", "omega")):
            self._nack(session, msg.seq, "out_of_range", "twist must be finite")
            return
        tokens = self._rate_tokens.get((team, number), self._rate_cap)
        if tokens < 1.0:
            self._nack(session, msg.seq, "rate_limited", "command budget exhausted")
            return
        self._rate_tokens[(team, number)] = tokens - 1.0
        self.world.command_robot(team, number, Twist(d["vx"], d["vy"], d["omega"]))
        self._log_in(session, msg)
        self._ack(session, msg.seq)

    def _apply_kick(self, session: Session, msg: WireMessage) -> None:
        addr = self._check_robot_addr(session, msg)
        if addr is None:
            return
        team, number = addr
        impulse = msg.data["impulse"]
        if not math.isfinite(impulse) or impulse < 0:
            self._nack(session, msg.seq, "out_of_range", "impulse must be >= 0")
            return
        try:
            result = self.world.kick(team, number, impulse)
        except KickCooldownError as exc:
            self._nack(session, msg.seq, "cooldown", str(exc))
            return
        self._log_in(session, msg)
        self._ack(
            session,
            msg.seq,
            {
                "contact": result.contact,
                "clipped": result.clipped,
                "speed": result.speed,
            },
        )

    def _apply_referee(self, session: Session, msg: WireMessage) -> None:
        if not session.is_referee:
            self._nack(session, msg.seq, "unauthorized", "referee key required")
            return
        data = msg.data
        action = data["action"]
        try:
            if action == "engage":
                placements = self.engine.start_engagement()
                for (team, number), (x, y, theta) in placements.items():
                    self.world.teleport_robot(team, number, Pose2D(x, y, theta))
                self.world.teleport_ball(Vec2(0.0, 0.0))
            elif action == "run":
                self.engine.run()
            elif action == "halftime":
                self.engine.halftime()
            elif action == "swap":
                self.engine.halftime_swap()
                self.world.swap_team_labels()
            elif action == "end":
                self.engine.end()
            elif action in ("preempt", "release"):
                self.engine.referee_preempt(
                    data["team"], data["number"], action == "preempt"
                )
            elif action == "teleport_robot":
                self.world.teleport_robot(
                    data["team"],
                    data["number"],
                    Pose2D(data["x"], data["y"], data.get("theta", 0.0)),
                )
            elif action == "teleport_ball":
                self.world.teleport_ball(Vec2(data["x"], data["y"]))
        except PhaseError as exc:
            self._nack(session, msg.seq, "phase", str(exc))
            return
        except (RobotNotFoundError, RulesError) as exc:
            self._nack(session, msg.seq, "not_found", str(exc))
            return
        except (PlacementError, WorldError, KeyError) as exc:
            self._nack(session, msg.seq, "out_of_range", str(exc))
            return
        self._sync_preemption()
        self._log_in(session, msg)
        self._ack(session, msg.seq)

    def _sync_preemption(self) -> None:
        for robot in self.world.robots:
            robot.preempted = not self.engine.controllable(robot.team, robot.number)

    # -- outbound ------------------------------------------------------------

    def _next_seq(self) -> int:
        self._out_seq += 1
        return self._out_seq

    def _send(self, session: Session, msg_type: str, data: dict) -> WireMessage:
        msg = WireMessage(msg_type, self._next_seq(), self.world.time, data)
        session.outbox.append(msg)
        if self.replay is not None:
            self.replay.write(self.world.time, "out", session.name, msg)
        return msg

    def _ack(self, session: Session, ack_of: int, info: Optional[dict] = None) -> None:
        data = {"ack_of": ack_of}
        if info:
            data["info"] = info
        self._send(session, "ack", data)

    def _nack(self, session: Session, nack_of: int, reason: str, detail: str) -> None:
        self._send(session, "nack", {"nack_of": nack_of, "reason": reason, "detail": detail})

    def _broadcast(self, msg_type: str, data: dict) -> None:
        msg = WireMessage(msg_type, self._next_seq(), self.world.time, data)
        for session in self.sessions.values():
            session.outbox.append(msg)
        if self.replay is not None:
            self.replay.write(self.world.time, "out", "*", msg)

    def _log_in(self, session: Session, msg: WireMessage) -> None:
        if self.replay is not None:
            self.replay.write(self.world.time, "in", session.name, msg)
