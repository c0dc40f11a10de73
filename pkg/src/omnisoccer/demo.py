"""Scripted matches: loopback clients and their network twins.

Loopback clients speak the exact same JSON protocol as network clients
(every message passes through encode/decode), but delivery is
tick-synchronized: all outbound messages are pumped and all client
reactions submitted between frame boundaries. With a fixed seed, a match
is therefore reproducible bit for bit, replay log included.

NetworkStrategyClient runs the same behaviors over a real WebSocket for
end-to-end demos; those runs are subject to socket timing and are not
bit-reproducible.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional

from websockets.sync.client import connect as ws_connect

from .config import RunConfig
from .controller import GameController
from .protocol import WireMessage, decode, encode, parse_detection
from .strategies import Behavior, make_behavior
from .world import DetectionFrame


class LoopbackClient:
    """In-process API client driven at frame boundaries."""

    def __init__(
        self,
        controller: GameController,
        key: str,
        behavior: Optional[Behavior] = None,
        name: Optional[str] = None,
    ) -> None:
        self.controller = controller
        self.behavior = behavior
        self.sid = controller.connect(name)
        self._seq = 0
        self.frame: Optional[DetectionFrame] = None
        self.game_state: Optional[dict] = None
        self.goals: list = []
        self.penalties: list = []
        self.nacks: list = []
        self.submit("auth", {"key": key})

    def submit(self, msg_type: str, data: dict) -> None:
        self._seq += 1
        t = self.frame.t if self.frame is not None else 0.0
        text = encode(WireMessage(msg_type, self._seq, t, data))
        self.controller.submit(self.sid, text)

    def pump(self) -> None:
        """Drain and decode everything the controller queued for us."""
        for outbound in self.controller.drain_outbox(self.sid):
            msg = decode(encode(outbound))  # full wire codec round-trip
            if msg.type == "detection":
                self.frame = parse_detection(msg)
            elif msg.type == "game_state":
                self.game_state = msg.data
            elif msg.type == "goal":
                self.goals.append(msg.data)
            elif msg.type == "penalty":
                self.penalties.append(msg.data)
            elif msg.type == "nack":
                self.nacks.append(msg.data)

    def act(self) -> None:
        if self.behavior is None or self.frame is None or self.game_state is None:
            return
        if self.game_state["phase"] != "running":
            return
        for msg_type, data in self.behavior.step(self.frame, self.game_state):
            self.submit(msg_type, data)


class RefereeDirector:
    """Edge-triggered referee: engagement, kickoffs after goals, halftime
    swap, and the final whistle."""

    def __init__(self, duration: float, half_duration: float) -> None:
        self.duration = duration
        self.half_duration = half_duration
        self._last_sig = None
        self._swapped_halves = set()

    def actions(self, game_state: dict, now: float) -> list:
        phase = game_state["phase"]
        elapsed = game_state["clock"] >= self.half_duration
        sig = (phase, game_state["goal_pending"], game_state["half"], elapsed)
        if sig == self._last_sig:
            return []
        self._last_sig = sig

        out = []
        if phase == "idle":
            out.append({"action": "engage"})
        elif phase == "placement":
            out.append({"action": "run"})
        elif phase == "running" and game_state["goal_pending"]:
            out.append({"action": "engage"})
        elif phase == "running" and elapsed:
            if game_state["half"] == 1:
                out.append({"action": "halftime"})
            else:
                out.append({"action": "end"})
        elif phase == "halftime":
            if game_state["half"] not in self._swapped_halves:
                self._swapped_halves.add(game_state["half"])
                out.append({"action": "swap"})
            out.append({"action": "engage"})
        return out


@dataclass
class MatchResult:
    score: dict
    frames: int
    sim_time: float
    goals: list = field(default_factory=list)
    penalties: list = field(default_factory=list)


def run_match(
    config: RunConfig,
    green: tuple = ("attacker", "goalie"),
    blue: tuple = ("attacker", "goalie"),
    duration: float = 120.0,
    replay_path=None,
    half_duration: Optional[float] = None,
) -> MatchResult:
    """Play one scripted match to completion and return the final score.

    `green` and `blue` give one strategy name per robot number. The match
    runs two halves of `half_duration` (default: duration/2) game-clock
    seconds each, driven entirely through the wire protocol.
    """
    if not config.keys.get("referee"):
        config = config.with_generated_keys()
    controller = GameController(config, replay_path=replay_path)
    halves = half_duration if half_duration is not None else duration / 2.0
    director = RefereeDirector(duration, halves)
    referee = LoopbackClient(controller, config.keys["referee"], name="referee")
    clients = [referee]
    for team, spec in (("green", green), ("blue", blue)):
        for number, strategy in enumerate(spec, start=1):
            if number > config.sim.team_size:
                break
            behavior = make_behavior(strategy, team, number, config.field)
            clients.append(
                LoopbackClient(
                    controller,
                    config.keys[team],
                    behavior,
                    name=f"{team}-{number}-{strategy}",
                )
            )

    goals: list = []
    penalties: list = []
    # generous frame budget: match time plus engagement overhead
    max_frames = int((duration * 1.5 + 30.0) * config.sim.detection_rate)
    frames = 0
    for _ in range(max_frames):
        controller.advance_frame()
        frames += 1
        for client in clients:
            client.pump()
        goals = referee.goals
        penalties = referee.penalties
        if referee.game_state is not None:
            if referee.game_state["phase"] == "finished":
                break
            for data in director.actions(referee.game_state, controller.time):
                referee.submit("referee", data)
        for client in clients[1:]:
            client.act()
    score = referee.game_state["score"] if referee.game_state else {"green": 0, "blue": 0}
    controller.close()
    return MatchResult(
        score=score,
        frames=frames,
        sim_time=controller.time,
        goals=goals,
        penalties=penalties,
    )


class NetworkStrategyClient(threading.Thread):
    """Behavior loop over a real WebSocket connection."""

    def __init__(self, url: str, key: str, behavior: Optional[Behavior] = None) -> None:
        super().__init__(daemon=True)
        self.url = url
        self.key = key
        self.behavior = behavior
        self.frame: Optional[DetectionFrame] = None
        self.game_state: Optional[dict] = None
        self.goals: list = []
        self.error: Optional[BaseException] = None
        self._seq = 0
        self._stop = threading.Event()

    def stop(self) -> None:
        self._stop.set()
        self.join(timeout=10)

    def _wire(self, msg_type: str, data: dict) -> str:
        self._seq += 1
        t = self.frame.t if self.frame is not None else 0.0
        return encode(WireMessage(msg_type, self._seq, t, data))

    def run(self) -> None:
        try:
            with ws_connect(self.url) as ws:
                ws.send(self._wire("auth", {"key": self.key}))
                while not self._stop.is_set():
                    try:
                        raw = ws.recv(timeout=1.0)
                    except TimeoutError:
                        continue
                    msg = decode(raw)
                    if msg.type == "detection":
                        self.frame = parse_detection(msg)
                        self._react(ws)
                    elif msg.type == "game_state":
                        self.game_state = msg.data
                    elif msg.type == "goal":
                        self.goals.append(msg.data)
        except BaseException as exc:  # surfaced by the owner thread
            self.error = exc

    def _react(self, ws) -> None:
        if self.behavior is None or self.frame is None or self.game_state is None:
            return
        if self.game_state["phase"] != "running":
            return
        for msg_type, data in self.behavior.step(self.frame, self.game_state):
            ws.send(self._wire(msg_type, data))


def run_network_match(
    url: str,
    keys: dict,
    green: tuple = ("attacker", "goalie"),
    blue: tuple = ("attacker", "goalie"),
    duration: float = 60.0,
    half_duration: Optional[float] = None,
    team_size: int = 2,
    field_geometry=None,
    poll_interval: float = 0.05,
) -> MatchResult:
    """Drive a match against a live service over real sockets."""
    from .world import FieldGeometry

    fg = field_geometry or FieldGeometry()
    halves = half_duration if half_duration is not None else duration / 2.0
    director = RefereeDirector(duration, halves)
    referee = NetworkStrategyClient(url, keys["referee"])
    clients = [referee]
    for team, spec in (("green", green), ("blue", blue)):
        for number, strategy in enumerate(spec, start=1):
            if number > team_size:
                break
            clients.append(
                NetworkStrategyClient(url, keys[team], make_behavior(strategy, team, number, fg))
            )
    for c in clients:
        c.start()
    try:
        with ws_connect(url) as ref_ws:
            seq = 0
            seq += 1
            ref_ws.send(encode(WireMessage("auth", seq, 0.0, {"key": keys["referee"]})))
            import time as _time

            deadline = _time.monotonic() + duration * 3 + 30
            gs = None
            while _time.monotonic() < deadline:
                gs = referee.game_state
                if gs is not None:
                    if gs["phase"] == "finished":
                        break
                    now = referee.frame.t if referee.frame else 0.0
                    for action in director.actions(gs, now):
                        seq += 1
                        ref_ws.send(encode(WireMessage("referee", seq, now, action)))
                _time.sleep(poll_interval)
    finally:
        for c in clients:
            c.stop()
    score = referee.game_state["score"] if referee.game_state else {"green": 0, "blue": 0}
    return MatchResult(
        score=score,
        frames=referee.frame.frame_number if referee.frame else 0,
        sim_time=referee.frame.t if referee.frame else 0.0,
        goals=referee.goals,
    )
