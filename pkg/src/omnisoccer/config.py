"""Configuration loading, validation, and replay-header serialization.

One TOML file configures the whole stack (field, physics, kicker,
detection, rules, network). Every value is validated at load time and
errors name the offending `section.key`. Scenario files share the format
and describe initial placements for tests and demos.
"""

from __future__ import annotations

import math
import secrets
import sys
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .ball import KickMap
from .kinematics import DEFAULT_MOUNT_ANGLES, WheelLayout
from .geometry import Pose2D, Vec2
from .rules import RuleParams
from .world import FieldGeometry, SimParams, World


class ConfigError(ValueError):
    """Malformed or out-of-range configuration value."""


@dataclass(frozen=True)
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 7401
    speed: float = 1.0  # simulated seconds per wall second

    def __post_init__(self) -> None:
        # port 0 asks the OS for an ephemeral port (printed at startup)
        if not 0 <= self.port < 65536:
            raise ConfigError(f"server.port: {self.port} outside 0..65535")
        if not self.speed > 0:
            raise ConfigError("server.speed: must be positive")


@dataclass(frozen=True)
class RunConfig:
    field: FieldGeometry = dataclass_field(default_factory=FieldGeometry)
    sim: SimParams = dataclass_field(default_factory=SimParams)
    rules: RuleParams = dataclass_field(default_factory=RuleParams)
    server: ServerConfig = dataclass_field(default_factory=ServerConfig)
    keys: dict = dataclass_field(default_factory=dict)  # green/blue/referee -> secret
    wheel_layout: WheelLayout = dataclass_field(default_factory=WheelLayout)
    seed: int = 0
    command_rate_limit: float = 100.0  # accepted commands per robot per sim second

    def with_generated_keys(self) -> "RunConfig":
        """Fill in any missing team/referee keys with fresh secrets."""
        keys = dict(self.keys)
        for name in ("green", "blue", "referee"):
            if not keys.get(name):
                keys[name] = f"{name}-{secrets.token_hex(8)}"
        return RunConfig(
            field=self.field,
            sim=self.sim,
            rules=self.rules,
            server=self.server,
            keys=keys,
            wheel_layout=self.wheel_layout,
            seed=self.seed,
            command_rate_limit=self.command_rate_limit,
        )

    def make_world(self) -> World:
        return World(self.field, self.sim, seed=self.seed)


def _get(table: dict, section: str, key: str, kind, default):
    if section not in table:
        return default
    sub = table[section]
    if not isinstance(sub, dict):
        raise ConfigError(f"{section}: expected a table")
    if key not in sub:
        return default
    value = sub[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ConfigError(f"{section}.{key}: expected {kind.__name__}, got {value!r}")
    return value


def parse_config(table: dict) -> RunConfig:
    """Build a validated RunConfig from a parsed TOML table."""
    try:
        field_geometry = FieldGeometry(
            length=_get(table, "field", "length", float, 1.83),
            width=_get(table, "field", "width", float, 1.22),
            goal_width=_get(table, "field", "goal_width", float, 0.60),
            margin=_get(table, "field", "margin", float, 0.30),
        )
    except ValueError as exc:
        raise ConfigError(f"field: {exc}") from exc

    kick_map = KickMap(
        c0=_get(table, "kicker", "map_c0", float, 0.0),
        c1=_get(table, "kicker", "map_c1", float, 0.0),
        c2=_get(table, "kicker", "map_c2", float, 40000.0),
        cap=_get(table, "kicker", "impulse_cap_s", float, 0.005),
    )
    try:
        sim = SimParams(
            physics_rate=_get(table, "physics", "rate_hz", int, 240),
            detection_rate=_get(table, "detection", "rate_hz", int, 30),
            robot_radius=_get(table, "physics", "robot_radius", float, 0.09),
            ball_radius=_get(table, "physics", "ball_radius", float, 0.021),
            ball_decel=_get(table, "physics", "ball_decel", float, 0.25),
            wall_restitution=_get(table, "physics", "wall_restitution", float, 0.3),
            borderless=_get(table, "physics", "borderless", bool, False),
            watchdog=_get(table, "physics", "watchdog_s", float, 0.5),
            team_size=_get(table, "robots", "team_size", int, 2),
            kick_map=kick_map,
            kick_noise_sigma=_get(table, "kicker", "noise_sigma", float, 0.05),
            kick_engage_distance=_get(table, "kicker", "engage_distance", float, 0.04),
            kick_engage_half_angle=math.radians(
                _get(table, "kicker", "engage_half_angle_deg", float, 25.0)
            ),
            kick_cooldown=_get(table, "kicker", "cooldown_s", float, 1.0),
            detection_mode=_get(table, "detection", "mode", str, "gaussian"),
            detection_pos_sigma=_get(table, "detection", "pos_sigma", float, 0.002),
            detection_angle_sigma=math.radians(
                _get(table, "detection", "angle_sigma_deg", float, 0.5)
            ),
            detection_ball_dropout=_get(table, "detection", "ball_dropout", float, 0.0),
            marker_size=_get(table, "detection", "marker_size", float, 0.10),
        )
    except ValueError as exc:
        raise ConfigError(f"physics/detection: {exc}") from exc

    try:
        rules = RuleParams(
            hold_radius=_get(table, "rules", "hold_radius", float, 0.25),
            hold_limit=_get(table, "rules", "hold_limit_s", float, 5.0),
            hold_grace=_get(table, "rules", "hold_grace_s", float, 0.5),
            penalty_duration=_get(table, "rules", "penalty_s", float, 5.0),
            half_duration=_get(table, "rules", "half_duration_s", float, 300.0),
            goal_rearm_margin=_get(table, "rules", "goal_rearm_margin", float, 0.10),
            kickoff_back=_get(table, "rules", "kickoff_back", float, 0.30),
        )
    except ValueError as exc:
        raise ConfigError(f"rules: {exc}") from exc

    angles_deg = table.get("robots", {}).get("wheel_angles_deg", None)
    if angles_deg is None:
        mount_angles = DEFAULT_MOUNT_ANGLES
    elif isinstance(angles_deg, list) and all(
        isinstance(a, (int, float)) and not isinstance(a, bool) for a in angles_deg
    ):
        mount_angles = tuple(math.radians(float(a)) for a in angles_deg)
    else:
        raise ConfigError("robots.wheel_angles_deg: expected a list of numbers")
    try:
        wheel_layout = WheelLayout(
            mount_angles=mount_angles,
            chassis_radius=_get(table, "robots", "chassis_radius", float, 0.06),
            wheel_radius=_get(table, "robots", "wheel_radius", float, 0.025),
        )
    except ValueError as exc:
        raise ConfigError(f"robots: {exc}") from exc

    server = ServerConfig(
        host=_get(table, "server", "host", str, "127.0.0.1"),
        port=_get(table, "server", "port", int, 7401),
        speed=_get(table, "server", "speed", float, 1.0),
    )
    keys = {
        name: _get(table, "keys", name, str, "")
        for name in ("green", "blue", "referee")
    }
    seed = table.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError(f"seed: expected integer, got {seed!r}")
    limit = _get(table, "rules", "command_rate_limit", float, 100.0)
    if limit <= 0:
        raise ConfigError("rules.command_rate_limit: must be positive")
    return RunConfig(
        field=field_geometry,
        sim=sim,
        rules=rules,
        server=server,
        keys=keys,
        wheel_layout=wheel_layout,
        seed=seed,
        command_rate_limit=limit,
    )


def load_config(path: Optional[str] = None) -> RunConfig:
    """Load a TOML config file; None loads pure defaults."""
    if path is None:
        return parse_config({})
    raw = Path(path).read_bytes()
    try:
        table = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(table)


def default_config_text() -> str:
    """Annotated TOML matching the built-in defaults."""
    return """\
# omnisoccer game-controller configuration (all units SI unless suffixed)

seed = 0

[server]
host = "127.0.0.1"
port = 7401
speed = 1.0            # simulated seconds per wall second

[keys]                 # empty strings are replaced by generated secrets
green = ""
blue = ""
referee = ""

[field]
length = 1.83
width = 1.22
goal_width = 0.60
margin = 0.30

[physics]
rate_hz = 240
robot_radius = 0.09
ball_radius = 0.021
ball_decel = 0.25      # measured rolling deceleration
wall_restitution = 0.3
borderless = false
watchdog_s = 0.5

[robots]
team_size = 2
wheel_angles_deg = [90.0, 210.0, 330.0]
chassis_radius = 0.06
wheel_radius = 0.025

[kicker]
impulse_cap_s = 0.005
cooldown_s = 1.0
engage_distance = 0.04
engage_half_angle_deg = 25.0
map_c0 = 0.0           # speed(t) = c0 + c1*t + c2*t^2, ~1 m/s at the cap
map_c1 = 0.0
map_c2 = 40000.0
noise_sigma = 0.05

[detection]
rate_hz = 30
mode = "gaussian"      # none | gaussian | pipeline
pos_sigma = 0.002
angle_sigma_deg = 0.5
ball_dropout = 0.0
marker_size = 0.10

[rules]
hold_radius = 0.25
hold_limit_s = 5.0
hold_grace_s = 0.5
penalty_s = 5.0
half_duration_s = 300.0
goal_rearm_margin = 0.10
kickoff_back = 0.30
command_rate_limit = 100.0
"""


# -- replay headers ---------------------------------------------------------


def config_to_header(cfg: RunConfig) -> dict:
    """JSON-ready snapshot of everything a replay needs (keys excluded)."""
    return {
        "seed": cfg.seed,
        "field": {
            "length": cfg.field.length,
            "width": cfg.field.width,
            "goal_width": cfg.field.goal_width,
            "margin": cfg.field.margin,
        },
        "sim": {
            "physics_rate": cfg.sim.physics_rate,
            "detection_rate": cfg.sim.detection_rate,
            "robot_radius": cfg.sim.robot_radius,
            "ball_radius": cfg.sim.ball_radius,
            "ball_decel": cfg.sim.ball_decel,
            "wall_restitution": cfg.sim.wall_restitution,
            "borderless": cfg.sim.borderless,
            "watchdog": cfg.sim.watchdog,
            "team_size": cfg.sim.team_size,
            "kick_map": [cfg.sim.kick_map.c0, cfg.sim.kick_map.c1, cfg.sim.kick_map.c2],
            "kick_cap": cfg.sim.kick_map.cap,
            "kick_noise_sigma": cfg.sim.kick_noise_sigma,
            "detection_mode": cfg.sim.detection_mode,
        },
        "rules": {
            "hold_radius": cfg.rules.hold_radius,
            "hold_limit": cfg.rules.hold_limit,
            "hold_grace": cfg.rules.hold_grace,
            "penalty_duration": cfg.rules.penalty_duration,
            "half_duration": cfg.rules.half_duration,
            "goal_rearm_margin": cfg.rules.goal_rearm_margin,
            "kickoff_back": cfg.rules.kickoff_back,
        },
    }


def field_from_header(header: dict) -> FieldGeometry:
    f = header["field"]
    return FieldGeometry(
        length=f["length"], width=f["width"],
        goal_width=f["goal_width"], margin=f["margin"],
    )


def rules_from_header(header: dict) -> RuleParams:
    r = header["rules"]
    return RuleParams(
        hold_radius=r["hold_radius"],
        hold_limit=r["hold_limit"],
        hold_grace=r["hold_grace"],
        penalty_duration=r["penalty_duration"],
        half_duration=r["half_duration"],
        goal_rearm_margin=r["goal_rearm_margin"],
        kickoff_back=r["kickoff_back"],
    )


# -- scenarios ----------------------------------------------------------------


def load_scenario(path) -> dict:
    raw = Path(path).read_bytes()
    try:
        return tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def apply_scenario(world: World, scenario: dict) -> None:
    """Teleport robots and ball to the placements a scenario file describes."""
    for entry in scenario.get("robots", []):
        try:
            world.teleport_robot(
                entry["team"],
                int(entry["number"]),
                Pose2D(float(entry["x"]), float(entry["y"]), float(entry.get("theta", 0.0))),
            )
        except KeyError as exc:
            raise ConfigError(f"scenario robot entry missing {exc}") from exc
    ball = scenario.get("ball")
    if ball is not None:
        world.teleport_ball(Vec2(float(ball["x"]), float(ball["y"])))
        vx, vy = float(ball.get("vx", 0.0)), float(ball.get("vy", 0.0))
        if vx or vy:
            world.ball = world.ball.__class__(world.ball.pos, Vec2(vx, vy))
