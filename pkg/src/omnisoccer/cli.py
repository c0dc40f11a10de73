"""Operator command line: serve, demo, replay, calibrate-kick, check-config.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import asyncio
import json
import math
import os
import sys
import time
from pathlib import Path

import click

from .ball import (
    InsufficientDataError,
    fit_kick_map,
    invert_kick_map,
    load_kick_samples,
    save_kick_samples,
    KickSample,
)
from .config import ConfigError, RunConfig, default_config_text, load_config
from .controller import GameController
from .demo import run_match, run_network_match
from .geometry import Pose2D, Vec2
from .replay import read_replay, verify_replay
from .server import GameServer, ServiceRunner
from .strategies import BEHAVIOR_NAMES, StrategyError
from .world import World


def _load(config_path, seed=None, port=None, speed=None) -> RunConfig:
    if config_path is not None and not Path(config_path).exists():
        click.echo(f"warning: config {config_path} not found, using defaults", err=True)
        config_path = None
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        raise click.ClickException(f"bad configuration: {exc}")
    if seed is not None or port is not None or speed is not None:
        from .config import ServerConfig

        server = ServerConfig(
            host=cfg.server.host,
            port=cfg.server.port if port is None else port,
            speed=cfg.server.speed if speed is None else speed,
        )
        cfg = RunConfig(
            field=cfg.field,
            sim=cfg.sim,
            rules=cfg.rules,
            server=server,
            keys=cfg.keys,
            wheel_layout=cfg.wheel_layout,
            seed=cfg.seed if seed is None else seed,
            command_rate_limit=cfg.command_rate_limit,
        )
    return cfg


def _parse_team_spec(raw: str) -> tuple:
    names = tuple(s.strip() for s in raw.split(",") if s.strip())
    for name in names:
        if name not in BEHAVIOR_NAMES:
            raise click.UsageError(
                f"unknown strategy {name!r}; choose from {', '.join(BEHAVIOR_NAMES)}"
            )
    return names or ("idle",)


@click.group()
@click.version_option(package_name="omnisoccer", prog_name="omnisoccer")
def main() -> None:
    """Tabletop robot-soccer game controller and simulator."""


@main.command()
@click.option("--config", "config_path", default=None, envvar="OMNISOCCER_CONFIG",
              help="TOML configuration file (env: OMNISOCCER_CONFIG).")
@click.option("--port", type=int, default=None, envvar="OMNISOCCER_PORT",
              help="Override the listen port (env: OMNISOCCER_PORT).")
@click.option("--seed", type=int, default=None, help="Override the simulation seed.")
@click.option("--speed", type=float, default=None, help="Sim seconds per wall second.")
@click.option("--replay-out", default=None, envvar="OMNISOCCER_REPLAY_OUT",
              help="Write a replay log to this path (env: OMNISOCCER_REPLAY_OUT).")
@click.option(
    "--console",
    "console_dir",
    is_flag=False,
    flag_value="frontend/static",
    default=None,
    help="Serve the operator console (optionally: its asset directory).",
)
def serve(config_path, port, seed, speed, replay_out, console_dir) -> None:
    """Run the Game Controller service."""
    cfg = _load(config_path, seed=seed, port=port, speed=speed).with_generated_keys()
    if console_dir is not None and not Path(console_dir).is_dir():
        raise click.ClickException(f"console assets not found at {console_dir}")
    controller = GameController(cfg, replay_path=replay_out)
    server = GameServer(
        controller,
        host=cfg.server.host,
        port=cfg.server.port,
        speed=cfg.server.speed,
        static_root=console_dir,
    )

    async def _run():
        task = asyncio.create_task(server.run())
        while server.bound_port is None and not task.done():
            await asyncio.sleep(0.01)
        if task.done():
            await task  # re-raise bind errors
            return
        click.echo(f"listening on ws://{cfg.server.host}:{server.bound_port}/api")
        if console_dir is not None:
            click.echo(f"console at http://{cfg.server.host}:{server.bound_port}/")
        click.echo(f"green key:   {cfg.keys['green']}")
        click.echo(f"blue key:    {cfg.keys['blue']}")
        click.echo(f"referee key: {cfg.keys['referee']}")
        if replay_out:
            click.echo(f"replay log:  {replay_out}")
        await task

    try:
        asyncio.run(_run())
    except KeyboardInterrupt:
        click.echo("shutting down")
    except OSError as exc:
        controller.close()
        raise click.ClickException(f"cannot bind port {cfg.server.port}: {exc}")
    finally:
        controller.close()


@main.command()
@click.option("--config", "config_path", default=None)
@click.option("--seed", type=int, default=None)
@click.option("--green", "green_spec", default="attacker,goalie", show_default=True)
@click.option("--blue", "blue_spec", default="attacker,goalie", show_default=True)
@click.option("--duration", type=float, default=120.0, show_default=True,
              help="Total match time in simulated seconds (two halves).")
@click.option("--replay-out", default=None, help="Write the match replay here.")
@click.option("--network", is_flag=True,
              help="Run the service and connect the strategies over WebSocket.")
def demo(config_path, seed, green_spec, blue_spec, duration, replay_out, network) -> None:
    """Play a scripted match between reference strategies."""
    cfg = _load(config_path, seed=seed)
    green = _parse_team_spec(green_spec)
    blue = _parse_team_spec(blue_spec)
    if network:
        cfg = cfg.with_generated_keys()
        try:
            with ServiceRunner(cfg, replay_path=replay_out, port=0, speed=20.0) as svc:
                result = run_network_match(
                    svc.url, svc.keys, green, blue, duration=duration,
                    team_size=cfg.sim.team_size, field_geometry=cfg.field,
                )
        except OSError as exc:
            raise click.ClickException(f"connection failure: {exc}")
    else:
        result = run_match(cfg, green, blue, duration=duration, replay_path=replay_out)
    click.echo(
        f"final score  green {result.score['green']} : {result.score['blue']} blue"
        f"  ({result.sim_time:.1f} sim seconds, {result.frames} frames)"
    )
    for g in result.goals:
        click.echo(f"  goal by {g['team']} at t={g['t']:.2f} s")
    if replay_out:
        click.echo(f"replay written to {replay_out}")


@main.command()
@click.argument("log_path")
@click.option("--speed", type=float, default=1.0, show_default=True)
@click.option("--verify", is_flag=True, help="Re-run the rules and report divergences.")
@click.option("--port", type=int, default=None, help="Playback port (default from config).")
def replay(log_path, speed, verify, port) -> None:
    """Play back a replay log on the API port, or verify it."""
    if not Path(log_path).exists():
        raise click.ClickException(f"no such log: {log_path}")
    if verify:
        report = verify_replay(log_path)
        if report.truncated:
            click.echo("warning: log was truncated; verified the complete prefix", err=True)
        click.echo(f"frames: {report.frames}  goals: {report.goals}")
        if report.ok:
            click.echo("verify: OK (zero divergences)")
            return
        click.echo(f"verify: {len(report.divergences)} divergence(s)", err=True)
        for d in report.divergences[:10]:
            click.echo(f"  {d}", err=True)
        sys.exit(1)

    from .replay import playback_schedule
    from websockets.asyncio.server import serve as ws_serve

    log = read_replay(log_path)
    if log.truncated:
        click.echo("warning: log truncated; playing back the complete prefix", err=True)

    async def _playback():
        clients = set()

        async def handler(ws):
            clients.add(ws)
            try:
                await ws.wait_closed()
            finally:
                clients.discard(ws)

        bind_port = port if port is not None else 7401
        async with ws_serve(handler, "127.0.0.1", bind_port) as server:
            actual = server.server.sockets[0].getsockname()[1]
            click.echo(f"playback on ws://127.0.0.1:{actual}/api at {speed}x")
            from .protocol import encode

            for delay, rec in playback_schedule(log, speed=speed):
                if delay > 0:
                    await asyncio.sleep(delay)
                if rec.session != "*":
                    continue  # broadcasts only: the spectator view
                dead = set()
                for ws in clients:
                    try:
                        await ws.send(encode(rec.msg))
                    except Exception:
                        dead.add(ws)
                clients.difference_update(dead)
        click.echo("playback complete")

    try:
        asyncio.run(_playback())
    except KeyboardInterrupt:
        click.echo("stopped")
    except OSError as exc:
        raise click.ClickException(f"cannot bind playback port: {exc}")


@main.command("calibrate-kick")
@click.option("--csv", "csv_path", default=None, help="Load samples from CSV.")
@click.option("--simulate", type=int, default=None, help="Generate N kicks in the simulator.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--noise", type=float, default=None, help="Override kick noise sigma (m/s).")
@click.option("--out", "out_csv", default=None, help="Also write the samples to CSV.")
def calibrate_kick(csv_path, simulate, seed, noise, out_csv) -> None:
    """Fit the impulse -> ball speed map from samples and print a lookup table."""
    if (csv_path is None) == (simulate is None):
        raise click.UsageError("choose exactly one of --csv or --simulate N")
    if csv_path is not None:
        try:
            samples = load_kick_samples(csv_path)
        except (OSError, ValueError) as exc:
            raise click.ClickException(f"cannot load samples: {exc}")
    else:
        samples = simulate_kick_samples(simulate, seed=seed, noise_sigma=noise)
    if out_csv:
        save_kick_samples(out_csv, samples)
        click.echo(f"samples written to {out_csv}")
    try:
        fit = fit_kick_map(samples)
    except InsufficientDataError as exc:
        raise click.ClickException(f"insufficient data: {exc}")
    except ValueError as exc:
        raise click.ClickException(f"cannot fit samples: {exc}")
    m = fit.map
    click.echo(f"samples: {len(samples)}  fit degree: {fit.degree}")
    click.echo(
        f"speed(t) = {m.c0:.6g} + {m.c1:.6g}*t + {m.c2:.6g}*t^2   (t in seconds, cap {m.cap})"
    )
    click.echo(f"residual variance: {fit.residual_var:.6g} (m/s)^2")
    click.echo("impulse lookup:")
    click.echo("  target speed  impulse")
    top = m.speed(m.cap)
    for frac in (0.1, 0.25, 0.5, 0.75, 0.9, 1.0):
        target = top * frac
        sol = invert_kick_map(m, target)
        mark = " (unreachable)" if sol.unreachable else ""
        click.echo(f"  {target:9.3f}     {sol.impulse * 1000:6.3f} ms{mark}")


def simulate_kick_samples(count: int, seed: int = 0, noise_sigma=None) -> list:
    """Kick the ball `count` times in a fresh simulator and log the speeds.

    Impulses sweep ten evenly spaced classes of the cap, several kicks per
    class, mirroring how one would sample a real kicker.
    """
    from .world import FieldGeometry, SimParams

    params = SimParams(detection_mode="none")
    if noise_sigma is not None:
        params = SimParams(detection_mode="none", kick_noise_sigma=noise_sigma)
    world = World(FieldGeometry(), params, seed=seed)
    cap = params.kick_map.cap
    contact = params.robot_radius + params.ball_radius + 0.005
    samples = []
    for i in range(count):
        impulse = cap * ((i % 10) + 1) / 10.0
        world.teleport_robot("green", 1, Pose2D(0.0, 0.0, 0.0))
        world.teleport_ball(Vec2(contact, 0.0))
        world.robots[0].cooldown_until = 0.0
        result = world.kick("green", 1, impulse)
        world.robot("green", 1).cooldown_until = world.time  # recharge instantly
        samples.append(KickSample(impulse, result.speed))
    return samples


@main.command("check-config")
@click.argument("config_path", required=False)
@click.option("--write-defaults", "write_path", default=None,
              help="Write an annotated default config to this path and exit.")
def check_config(config_path, write_path) -> None:
    """Validate a configuration file (or print the built-in defaults)."""
    if write_path is not None:
        Path(write_path).write_text(default_config_text())
        click.echo(f"defaults written to {write_path}")
        return
    if config_path is None:
        click.echo(default_config_text(), nl=False)
        return
    try:
        cfg = load_config(config_path)
    except (OSError, ConfigError) as exc:
        raise click.ClickException(str(exc))
    click.echo(
        f"ok: field {cfg.field.length}x{cfg.field.width} m, "
        f"{cfg.sim.team_size} robots/team, detection {cfg.sim.detection_rate} Hz, "
        f"physics {cfg.sim.physics_rate} Hz, seed {cfg.seed}"
    )


if __name__ == "__main__":
    main()
