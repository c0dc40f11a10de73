"""Wire message codec and schema validation.

Each WebSocket text frame carries one JSON object: a type tag, a
per-sender sequence number, a timestamp and a typed payload. Encoding is
canonical (sorted keys, compact separators) so identical message streams
serialize to identical bytes, which makes replay logs diffable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from jsonschema import Draft202012Validator

PROTOCOL_VERSION = 1

MESSAGE_TYPES = (
    "hello",
    "auth",
    "detection",
    "command",
    "kick",
    "ack",
    "nack",
    "referee",
    "game_state",
    "goal",
    "penalty",
)

NACK_REASONS = (
    "unauthorized",
    "preempted",
    "out_of_range",
    "rate_limited",
    "cooldown",
    "not_found",
    "phase",
    "protocol",
)


class ProtocolError(ValueError):
    """Message violates the wire protocol."""


def _load_schema() -> dict:
    text = resources.files("omnisoccer").joinpath("protocol_schema.json").read_text()
    return json.loads(text)


SCHEMA = _load_schema()
_ENVELOPE = Draft202012Validator(
    {"$ref": "#/$defs/envelope", "$defs": SCHEMA["$defs"]}
)
_PAYLOADS = {
    name: Draft202012Validator({"$ref": f"#/$defs/{name}", "$defs": SCHEMA["$defs"]})
    for name in MESSAGE_TYPES
}


@dataclass(frozen=True)
class WireMessage:
    """Envelope around one protocol payload."""

    type: str
    seq: int
    t: float
    data: dict

    def to_dict(self) -> dict:
        return {"type": self.type, "seq": self.seq, "t": self.t, "data": self.data}


def validate_dict(obj: dict) -> None:
    """Raise ProtocolError unless `obj` is a valid wire message."""
    err = next(_ENVELOPE.iter_errors(obj), None)
    if err is not None:
        raise ProtocolError(f"bad envelope: {err.message}")
    err = next(_PAYLOADS[obj["type"]].iter_errors(obj["data"]), None)
    if err is not None:
        raise ProtocolError(f"bad {obj['type']} payload: {err.message}")


def encode(msg: WireMessage) -> str:
    """Canonical JSON text for one message."""
    return json.dumps(msg.to_dict(), sort_keys=True, separators=(",", ":"))


def decode(text) -> WireMessage:
    """Parse and validate one message from wire text."""
    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ProtocolError(f"not JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ProtocolError("message must be a JSON object")
    validate_dict(obj)
    return WireMessage(
        type=obj["type"], seq=int(obj["seq"]), t=float(obj["t"]), data=obj["data"]
    )


def detection_payload(frame) -> dict:
    """DetectionFrame -> wire payload."""
    return {
        "frame": frame.frame_number,
        "robots": [
            {
                "team": r.team,
                "number": r.number,
                "x": r.pose.x,
                "y": r.pose.y,
                "theta": r.pose.theta,
            }
            for r in frame.robots
        ],
        "ball": None if frame.ball is None else {"x": frame.ball.x, "y": frame.ball.y},
        "calibration_ok": frame.calibration_ok,
    }


def parse_detection(msg: WireMessage):
    """Wire payload -> DetectionFrame (inverse of detection_payload)."""
    from .geometry import Pose2D, Vec2
    from .world import DetectionFrame, RobotDetection

    d = msg.data
    robots = tuple(
        RobotDetection(r["team"], r["number"], Pose2D(r["x"], r["y"], r["theta"]))
        for r in d["robots"]
    )
    ball = None if d["ball"] is None else Vec2(d["ball"]["x"], d["ball"]["y"])
    return DetectionFrame(
        t=msg.t,
        frame_number=d["frame"],
        robots=robots,
        ball=ball,
        calibration_ok=d["calibration_ok"],
    )
