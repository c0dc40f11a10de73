"""Synchronous client for the omnisoccer game controller.

Connect with your team key, read the latest detection frame, send chassis
speed targets and kicks, or just call `goto`. A background thread keeps
the detection cache fresh; your own code stays a plain single-threaded
loop. Handles are not shareable across threads.

All positions are meters, all angles radians, in the field frame, exactly
as the service broadcasts them.
"""

from __future__ import annotations

import json
import math
import threading
import time
from dataclasses import dataclass
from typing import Optional

from websockets.sync.client import connect as ws_connect

DEFAULT_PORT = 7401
CONNECT_TIMEOUT = 3.0  # s
V_MAX = 0.20  # m/s chassis translation cap (mirrors the service)
W_MAX = math.pi  # rad/s rotation cap
COMMANDS_PER_SECOND = 100.0  # service-side acceptance limit per robot


class ClientError(Exception):
    """Connection or protocol failure."""


@dataclass(frozen=True)
class RobotView:
    team: str
    number: int
    x: float
    y: float
    theta: float


@dataclass(frozen=True)
class FrameView:
    """One detection frame as seen by clients."""

    t: float
    frame: int
    robots: tuple
    ball: Optional[tuple]  # (x, y) or None when undetected
    calibration_ok: bool

    def robot(self, team: str, number: int) -> Optional[RobotView]:
        for r in self.robots:
            if r.team == team and r.number == number:
                return r
        return None


def _wrap(angle: float) -> float:
    wrapped = angle - 2.0 * math.pi * math.floor((angle + math.pi) / (2.0 * math.pi))
    return math.pi if wrapped <= -math.pi else wrapped


def connect(host: str = "127.0.0.1", port: int = DEFAULT_PORT, key: str = "",
            timeout: float = CONNECT_TIMEOUT) -> "ClientHandle":
    """Open a session; with a team key you control that team, otherwise you
    spectate. Raises ClientError (with the reason) when the service is
    unreachable."""
    return ClientHandle(host, port, key, timeout)


class ClientHandle:
    def __init__(self, host: str, port: int, key: str, timeout: float) -> None:
        url = f"ws://{host}:{port}/api"
        try:
            self._ws = ws_connect(url, open_timeout=timeout)
        except (OSError, TimeoutError) as exc:
            raise ClientError(f"cannot reach {url}: {exc}") from exc
        self.team: str = "spectator"
        self.hello: Optional[dict] = None
        self._seq = 0
        self._frame: Optional[FrameView] = None
        self._game_state: Optional[dict] = None
        self._events: list = []
        self._responses: dict = {}
        self._subscribers: list = []
        self._cond = threading.Condition()
        self._closed = threading.Event()
        self._last_cmd: dict = {}
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

        auth_seq = self._send("auth", {"key": key})
        reply = self._wait_response(auth_seq, timeout=timeout)
        if reply is None:
            self.close()
            raise ClientError("service did not answer the auth request")
        self.team = reply.get("info", {}).get("team", "spectator")
        if key and self.team == "spectator":
            # wrong key: the service downgraded us; keep going but say so
            print("omnisoccer-client: unknown key, continuing as spectator")

    # -- plumbing -----------------------------------------------------------

    def _send(self, msg_type: str, data: dict) -> int:
        self._seq += 1
        t = self._frame.t if self._frame is not None else 0.0
        payload = {"type": msg_type, "seq": self._seq, "t": t, "data": data}
        try:
            self._ws.send(json.dumps(payload, sort_keys=True, separators=(",", ":")))
        except Exception as exc:
            raise ClientError(f"send failed: {exc}") from exc
        return self._seq

    def _read_loop(self) -> None:
        try:
            while not self._closed.is_set():
                try:
                    raw = self._ws.recv(timeout=0.5)
                except TimeoutError:
                    continue
                msg = json.loads(raw)
                self._dispatch(msg)
        except Exception:
            if not self._closed.is_set():
                self._closed.set()

    def _dispatch(self, msg: dict) -> None:
        kind = msg.get("type")
        data = msg.get("data", {})
        with self._cond:
            if kind == "hello":
                self.hello = data
            elif kind == "detection":
                self._frame = FrameView(
                    t=msg["t"],
                    frame=data["frame"],
                    robots=tuple(
                        RobotView(r["team"], r["number"], r["x"], r["y"], r["theta"])
                        for r in data["robots"]
                    ),
                    ball=None if data["ball"] is None else (data["ball"]["x"], data["ball"]["y"]),
                    calibration_ok=data["calibration_ok"],
                )
                for queue in self._subscribers:
                    queue.append(self._frame)
            elif kind == "game_state":
                self._game_state = data
            elif kind in ("goal", "penalty"):
                self._events.append((kind, data))
            elif kind in ("ack", "nack"):
                ref = data.get("ack_of", data.get("nack_of"))
                self._responses[ref] = (kind == "ack", data)
            self._cond.notify_all()

    def _wait_response(self, seq: int, timeout: float = 2.0) -> Optional[dict]:
        deadline = time.monotonic() + timeout
        with self._cond:
            while seq not in self._responses:
                remaining = deadline - time.monotonic()
                if remaining <= 0 or self._closed.is_set():
                    return None
                self._cond.wait(remaining)
            ok, data = self._responses.pop(seq)
            return data if ok else {"nack": data}

    # -- reading the world ------------------------------------------------------

    def latest(self) -> Optional[FrameView]:
        """Most recent detection frame (None until the first one arrives)."""
        return self._frame

    def wait_frame(self, timeout: float = 2.0) -> FrameView:
        """Block until a frame newer than the current one arrives."""
        with self._cond:
            current = self._frame.frame if self._frame is not None else -1
            deadline = time.monotonic() + timeout
            while self._frame is None or self._frame.frame <= current:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    raise ClientError("no detection frame within the timeout")
                self._cond.wait(remaining)
            return self._frame

    def game_state(self) -> Optional[dict]:
        return self._game_state

    def subscribe_frames(self) -> "FrameSubscription":
        """Lossless frame feed: every detection from now on, in order."""
        return FrameSubscription(self)

    def events(self) -> list:
        """Goals and penalties observed so far (kind, payload) pairs."""
        return list(self._events)

    # -- acting --------------------------------------------------------------

    def _throttle(self, number: int) -> None:
        """Stay under the service's per-robot budget (100 commands per

        simulated second). Budgeting is per detection frame so it scales
        with services running faster or slower than real time: at 30 Hz
        detections, 3 commands per frame is the sustainable ceiling.
        """
        per_frame = max(1, int(COMMANDS_PER_SECOND / 30.0))
        while True:
            frame = self._frame.frame if self._frame is not None else -1
            key_frame, used = self._last_cmd.get(number, (-1, 0))
            if key_frame != frame:
                self._last_cmd[number] = (frame, 1)
                return
            if used < per_frame:
                self._last_cmd[number] = (frame, used + 1)
                return
            try:
                self.wait_frame(timeout=2.0)
            except ClientError:
                return  # stream stalled: let the service arbitrate

    def command(self, number: int, vx: float, vy: float, omega: float) -> bool:
        """Chassis speed target in the robot frame; True when acked."""
        if self.team not in ("green", "blue"):
            raise ClientError("spectators cannot command robots")
        self._throttle(number)
        seq = self._send(
            "command",
            {"team": self.team, "number": number, "vx": vx, "vy": vy, "omega": omega},
        )
        reply = self._wait_response(seq)
        return reply is not None and "nack" not in reply

    def stop(self, number: int) -> bool:
        return self.command(number, 0.0, 0.0, 0.0)

    def kick(self, number: int, impulse: float = 0.005) -> bool:
        """Fire the kicker (impulse seconds, hard-capped at 5 ms by the service)."""
        if self.team not in ("green", "blue"):
            raise ClientError("spectators cannot kick")
        seq = self._send("kick", {"team": self.team, "number": number, "impulse": impulse})
        reply = self._wait_response(seq)
        return reply is not None and "nack" not in reply

    def goto(
        self,
        number: int,
        x: float,
        y: float,
        theta: float,
        pos_tol: float = 0.02,
        ang_tol: float = math.radians(2.0),
        timeout: float = 30.0,
        kp_pos: float = 2.0,
        kp_ang: float = 3.0,
    ) -> bool:
        """Drive a robot to an absolute pose by proportional servoing.

        Streams one command per detection frame until within both
        tolerances (True) or until the timeout or a preemption (False).
        The robot is stopped on every exit path.
        """
        deadline = time.monotonic() + timeout
        settled = 0  # consecutive in-tolerance frames while stopped
        try:
            while time.monotonic() < deadline:
                frame = self.wait_frame(timeout=2.0)
                me = frame.robot(self.team, number)
                if me is None:
                    continue
                dx = x - me.x
                dy = y - me.y
                ang_err = _wrap(theta - me.theta)
                if math.hypot(dx, dy) <= pos_tol and abs(ang_err) <= ang_tol:
                    # hold still and require confirmation on fresh frames, so
                    # in-flight commands cannot carry the robot back out
                    if not self.stop(number):
                        return False
                    settled += 1
                    if settled >= 3:
                        return True
                    continue
                settled = 0
                cos_t, sin_t = math.cos(me.theta), math.sin(me.theta)
                vx = kp_pos * (cos_t * dx + sin_t * dy)
                vy = kp_pos * (-sin_t * dx + cos_t * dy)
                speed = math.hypot(vx, vy)
                if speed > V_MAX:
                    vx *= V_MAX / speed
                    vy *= V_MAX / speed
                omega = max(-W_MAX, min(W_MAX, kp_ang * ang_err))
                if not self.command(number, vx, vy, omega):
                    self.stop(number)
                    return False
        finally:
            try:
                self.stop(number)
            except ClientError:
                pass
        return False

    # -- lifecycle ------------------------------------------------------------

    def close(self) -> None:
        self._closed.set()
        try:
            self._ws.close()
        except Exception:
            pass

    def __enter__(self) -> "ClientHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class FrameSubscription:
    """Ordered, gap-free stream of detection frames from one handle."""

    def __init__(self, handle: ClientHandle) -> None:
        self._handle = handle
        self._buffer: list = []
        with handle._cond:
            handle._subscribers.append(self._buffer)

    def next(self, timeout: float = 2.0) -> FrameView:
        deadline = time.monotonic() + timeout
        cond = self._handle._cond
        with cond:
            while not self._buffer:
                remaining = deadline - time.monotonic()
                if remaining <= 0 or self._handle._closed.is_set():
                    raise ClientError("no detection frame within the timeout")
                cond.wait(remaining)
            return self._buffer.pop(0)

    def close(self) -> None:
        with self._handle._cond:
            if self._buffer in self._handle._subscribers:
                self._handle._subscribers.remove(self._buffer)

    def __enter__(self) -> "FrameSubscription":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
