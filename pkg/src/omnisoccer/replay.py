"""Append-only replay logs and their verification.

A replay is JSON-lines: a self-describing header record (config + seed)
followed by one record per message, `{"t", "dir", "session", "msg"}`,
with non-decreasing timestamps. Because the rule engine is a pure
function of (previous state, detection frame, referee inputs), a log can
be re-verified: re-running the rules over the recorded frames must
reproduce every recorded game_state snapshot and goal event exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .config import field_from_header, rules_from_header
from .protocol import WireMessage, encode, parse_detection
from .rules import GoalEvent, RuleEngine

LOG_FORMAT_VERSION = 1


class ReplayError(ValueError):
    """Unreadable or inconsistent replay log."""


@dataclass(frozen=True)
class ReplayRecord:
    t: float  # sim seconds
    direction: str  # "in" | "out"
    session: str  # session name, "*" for broadcasts
    msg: WireMessage


class ReplayWriter:
    """Appends records with strictly non-decreasing timestamps."""

    def __init__(self, path, header: dict) -> None:
        self._fh = open(path, "w", encoding="utf-8")
        self._last_t = -math.inf
        head = {"format": LOG_FORMAT_VERSION, "header": header}
        self._fh.write(json.dumps(head, sort_keys=True, separators=(",", ":")) + "\n")

    def write(self, t: float, direction: str, session: str, msg: WireMessage) -> None:
        if t < self._last_t:
            raise ReplayError(f"timestamp went backwards: {t} < {self._last_t}")
        self._last_t = t
        record = {"t": t, "dir": direction, "session": session,
                  "msg": json.loads(encode(msg))}
        self._fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")

    def close(self) -> None:
        self._fh.close()


@dataclass
class ReplayLog:
    header: dict
    records: list
    truncated: bool = False


def read_replay(path) -> ReplayLog:
    """Read a log; a truncated final line yields a warning flag, not an error."""
    records = []
    header = None
    truncated = False
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError:
                truncated = True
                break
            if line_no == 0:
                if "header" not in obj:
                    raise ReplayError("first record must be the header")
                header = obj["header"]
                continue
            try:
                m = obj["msg"]
                records.append(
                    ReplayRecord(
                        t=float(obj["t"]),
                        direction=obj["dir"],
                        session=obj["session"],
                        msg=WireMessage(m["type"], m["seq"], m["t"], m["data"]),
                    )
                )
            except (KeyError, TypeError):
                truncated = True
                break
    if header is None:
        raise ReplayError("log has no header record")
    return ReplayLog(header=header, records=records, truncated=truncated)


def playback_schedule(log: ReplayLog, speed: float = 1.0) -> Iterator:
    """Yield (delay_seconds, record) for outbound records on the original
    timeline scaled by `speed`."""
    if speed <= 0:
        raise ReplayError("playback speed must be positive")
    prev_t: Optional[float] = None
    for rec in log.records:
        if rec.direction != "out":
            continue
        delay = 0.0 if prev_t is None else max(0.0, (rec.t - prev_t) / speed)
        prev_t = rec.t
        yield delay, rec


@dataclass
class VerifyReport:
    frames: int = 0
    goals: int = 0
    divergences: list = field(default_factory=list)
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.divergences


_PLACEHOLDER_KEYS = {"green": "verify-green", "blue": "verify-blue"}


def verify_replay(path) -> VerifyReport:
    """Re-run the rule engine over a log and diff its GameState evolution.

    Logged referee actions are applied in order (they were acked, so they
    are known-legal); every logged detection advances the engine; every
    logged game_state and goal is compared against the recomputation.
    """
    log = read_replay(path)
    report = VerifyReport(truncated=log.truncated)
    engine = RuleEngine(
        field_from_header(log.header),
        rules_from_header(log.header),
        _PLACEHOLDER_KEYS,
        "verify-referee",
        team_size=log.header["sim"]["team_size"],
    )
    frame_dt = 1.0 / log.header["sim"]["detection_rate"]
    pending_goals = []

    for index, rec in enumerate(log.records):
        msg = rec.msg
        if rec.direction == "in" and msg.type == "referee":
            _apply_referee(engine, msg.data, report, index)
        elif rec.direction == "out" and msg.type == "detection":
            frame = parse_detection(msg)
            events = engine.on_detection(frame, frame_dt)
            report.frames += 1
            pending_goals.extend(e for e in events if isinstance(e, GoalEvent))
        elif rec.direction == "out" and msg.type == "goal":
            report.goals += 1
            if not pending_goals:
                report.divergences.append(
                    f"record {index}: logged goal not reproduced by the rules"
                )
                continue
            expect = pending_goals.pop(0)
            got = msg.data
            if (
                got["team"] != expect.team
                or abs(got["x"] - expect.point.x) > 1e-9
                or abs(got["y"] - expect.point.y) > 1e-9
            ):
                report.divergences.append(
                    f"record {index}: goal mismatch (logged {got}, recomputed "
                    f"{expect.team} at ({expect.point.x}, {expect.point.y}))"
                )
        elif rec.direction == "out" and msg.type == "game_state":
            recomputed = engine.snapshot()
            if msg.data != recomputed:
                report.divergences.append(
                    f"record {index}: game_state diverged "
                    f"(logged {msg.data}, recomputed {recomputed})"
                )
    if pending_goals:
        report.divergences.append(
            f"{len(pending_goals)} recomputed goal(s) missing from the log"
        )
    return report


def _apply_referee(engine: RuleEngine, data: dict, report: VerifyReport, index: int) -> None:
    action = data["action"]
    try:
        if action == "engage":
            engine.start_engagement()
        elif action == "run":
            engine.run()
        elif action == "halftime":
            engine.halftime()
        elif action == "swap":
            engine.halftime_swap()
        elif action == "end":
            engine.end()
        elif action == "preempt":
            engine.referee_preempt(data["team"], data["number"], True)
        elif action == "release":
            engine.referee_preempt(data["team"], data["number"], False)
        # teleports only touch the world, never the GameState
    except ValueError as exc:
        report.divergences.append(
            f"record {index}: logged referee action {action!r} now illegal: {exc}"
        )
