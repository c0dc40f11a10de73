"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
lines as they complete. Tolerances are pinned here, not configurable.
"""

import math
import random
import time

import numpy as np
import pytest

from omnisoccer.ball import (
    BallState,
    DecelModel,
    fit_kick_map,
    invert_kick_map,
    predict_stop,
)
from omnisoccer.camera import fiducial_correspondences, make_synthetic_camera
from omnisoccer.cli import simulate_kick_samples
from omnisoccer.config import load_config
from omnisoccer.controller import GameController
from omnisoccer.demo import LoopbackClient, run_match
from omnisoccer.geometry import Pose2D, Vec2, angle_error, bearing, wrap_angle
from omnisoccer.kinematics import (
    Twist,
    WheelLayout,
    clamp_twist,
    forward_kinematics,
    inverse_kinematics,
)
from omnisoccer.replay import verify_replay
from omnisoccer.rules import GoalEvent, PenaltyEvent, RuleEngine, RuleParams
from omnisoccer.strategies import (
    ChaserBehavior,
    attacker_plan,
    goalie_intercept,
    goto_step,
    GotoTarget,
)
from omnisoccer.vision import (
    Correspondence,
    ImageGeometry,
    check_field_visible,
    fit_homography,
    verify_calibration,
)
from omnisoccer.world import DetectionFrame, FieldGeometry, RobotDetection, SimParams, World


def report(name: str, failures: list) -> None:
    status = "PASS" if not failures else "FAIL"
    print(f"[{status}] {name}")
    for f in failures:
        print(f"       - {f}")
    assert not failures, f"{name}: {failures}"


def fresh_config(seed=0):
    cfg = load_config(None)
    return type(cfg)(
        field=cfg.field,
        sim=cfg.sim,
        rules=cfg.rules,
        server=cfg.server,
        keys={"green": "kg", "blue": "kb", "referee": "kr"},
        seed=seed,
        command_rate_limit=cfg.command_rate_limit,
    )


# ---------------------------------------------------------------------------


def test_homography_recovery():
    """16 correspondences under a known projective camera."""
    failures = []
    camera = make_synthetic_camera()
    field = FieldGeometry()
    t0 = time.perf_counter()

    exact = fiducial_correspondences(camera, field.length, field.width)
    if len(exact) != 16:
        failures.append(f"expected 16 correspondences, got {len(exact)}")
    h = fit_homography(exact)
    clean = verify_calibration(h, exact)
    if not clean.max_residual < 1e-9:
        failures.append(f"noise-free max residual {clean.max_residual:.3e} >= 1e-9 m")

    rng = random.Random(20240817)
    noisy = fiducial_correspondences(
        camera, field.length, field.width, noise_sigma_px=0.5, rng=rng
    )
    noisy_report = verify_calibration(fit_homography(noisy), noisy)
    if not noisy_report.max_residual < 0.005:
        failures.append(
            f"sigma=0.5px max residual {noisy_report.max_residual * 1000:.2f} mm >= 5 mm"
        )
    elapsed = time.perf_counter() - t0
    if elapsed >= 1.0:
        failures.append(f"runtime {elapsed:.2f} s >= 1 s")
    report("homography: <1e-9 m noise-free, <5 mm at 0.5 px noise, <1 s", failures)


def test_calibration_gate():
    """Corrupting any one of the 16 points by 5 cm must flip verification."""
    failures = []
    camera = make_synthetic_camera()
    field = FieldGeometry()
    corrs = fiducial_correspondences(camera, field.length, field.width)
    h = fit_homography(corrs)
    base = verify_calibration(h, corrs)
    if not base.passed:
        failures.append("clean calibration unexpectedly fails")
    for index in range(16):
        bad = list(corrs)
        c = bad[index]
        bad[index] = Correspondence(c.u, c.v, c.x + 0.05, c.y)
        rep = verify_calibration(h, bad)
        if rep.passed:
            failures.append(f"5 cm corruption of point {index} not detected")
        if rep.worst_index != index:
            failures.append(f"offender {index} reported as {rep.worst_index}")
    report("calibration gate: any single 5 cm corruption flips to fail", failures)


def test_visibility_flip():
    """Sweeping the camera until a field corner leaves the image flips once."""
    failures = []
    field = FieldGeometry()
    corners = list(field.corners())
    image = ImageGeometry()
    states = []
    for shift in np.linspace(0.0, 300.0, 301):
        cam = make_synthetic_camera(center_offset=(float(shift), 0.0))
        states.append(check_field_visible(cam, corners, image))
    flips = sum(1 for a, b in zip(states, states[1:]) if a != b)
    if states[0] is not True:
        failures.append("field should start visible")
    if states[-1] is not False:
        failures.append("field should end out of view")
    if flips != 1:
        failures.append(f"visibility flipped {flips} times, expected exactly 1")
    report("visibility: border sweep flips check_field_visible exactly once", failures)


def test_ball_roll_distance_and_stop_time():
    """A 1.0 m/s kick rolls 2.000 m and stops in 4.00 s in simulation."""
    failures = []
    big = FieldGeometry(length=6.0, width=3.0, goal_width=0.6, margin=0.5)
    params = SimParams(detection_mode="none", kick_noise_sigma=0.0, borderless=True)
    world = World(big, params, seed=0)
    for team, number, y in (("green", 2, 1.0), ("blue", 1, -1.0), ("blue", 2, 1.2)):
        world.teleport_robot(team, number, Pose2D(-2.5, y, 0.0))
    world.teleport_robot("green", 1, Pose2D(-2.4, 0.0, 0.0))
    contact = params.robot_radius + params.ball_radius + 0.005
    world.teleport_ball(Vec2(-2.4 + contact, 0.0))
    result = world.kick("green", 1, 0.005)
    if abs(result.speed - 1.0) > 1e-9:
        failures.append(f"kick speed {result.speed} != 1.0")
    start = world.ball.pos
    while not world.ball.at_rest():
        world.step()
    rolled = world.ball.pos.distance_to(start)
    stop_time = world.time
    if abs(rolled - 2.0) > 1e-3:
        failures.append(f"rolled {rolled:.5f} m, expected 2.000 +- 0.001")
    if abs(stop_time - 4.0) > 1e-2:
        failures.append(f"stopped at {stop_time:.4f} s, expected 4.00 +- 0.01")

    model = DecelModel(0.25)
    rng = random.Random(77)
    worst = 0.0
    for _ in range(1000):
        state = BallState(
            Vec2(rng.uniform(-1, 1), rng.uniform(-1, 1)),
            Vec2(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)),
        )
        predicted = predict_stop(state, model).pos
        sim = state
        while not sim.at_rest():
            from omnisoccer.ball import step_ball

            sim = step_ball(sim, model, 1e-3)
        worst = max(worst, predicted.distance_to(sim.pos))
    if worst >= 1e-6:
        failures.append(f"predict_stop vs simulation worst error {worst:.2e} >= 1e-6")
    report("ball model: 1 m/s kick rolls 2.000 m / 4.00 s; predict_stop <=1e-6", failures)


def test_finite_difference_speed_slope():
    """30 Hz detections of a kicked ball regress to slope -0.25 +- 0.01."""
    failures = []
    big = FieldGeometry(length=6.0, width=3.0, goal_width=0.6, margin=0.5)
    params = SimParams(detection_mode="gaussian", kick_noise_sigma=0.0, borderless=True)
    world = World(big, params, seed=4242)
    for team, number, y in (("green", 2, 1.0), ("blue", 1, -1.0), ("blue", 2, 1.2)):
        world.teleport_robot(team, number, Pose2D(-2.5, y, 0.0))
    world.teleport_robot("green", 1, Pose2D(-2.4, 0.0, 0.0))
    contact = params.robot_radius + params.ball_radius + 0.005
    world.teleport_ball(Vec2(-2.4 + contact, 0.0))
    world.kick("green", 1, 0.005)

    track = []
    frame_number = 0
    for _ in range(150):  # 5 s at 30 Hz
        for _ in range(params.ticks_per_frame):
            world.step()
        frame_number += 1
        frame = world.emit_detection(frame_number)
        if frame.ball is not None:
            track.append((frame.t, frame.ball))
    # 4-frame differences tame the noise; regress the clearly-moving band
    # (low-speed estimates are biased upward because a norm is never negative)
    span = 4
    speeds = []
    for i in range(span, len(track)):
        t0, p0 = track[i - span]
        t1, p1 = track[i]
        speeds.append(((t0 + t1) / 2.0, p0.distance_to(p1) / (t1 - t0)))
    moving = [(t, s) for t, s in speeds if 0.15 < s < 0.90]
    ts = np.array([m[0] for m in moving])
    ss = np.array([m[1] for m in moving])
    slope = float(np.polyfit(ts, ss, 1)[0])
    if abs(slope + 0.25) > 0.01:
        failures.append(f"speed-curve slope {slope:.4f}, expected -0.25 +- 0.01")
    report("finite-difference speed curve: slope -0.25 +- 0.01 m/s^2", failures)


def test_kick_calibration_workflow():
    """Noisy sampling, quadratic fit, inversion: the full calibration loop."""
    failures = []
    cap, top = 0.005, 1.0
    norm_errors = {0: [], 1: [], 2: []}
    inversion_medians = []
    for seed in range(20):
        samples = simulate_kick_samples(50, seed=seed, noise_sigma=0.05)
        fitted = fit_kick_map(samples).map
        norm_errors[0].append(abs(fitted.c0 - 0.0) / top)
        norm_errors[1].append(abs(fitted.c1 - 0.0) * cap / top)
        norm_errors[2].append(abs(fitted.c2 - 40000.0) * cap * cap / top)
        rng = np.random.default_rng(9000 + seed)
        errors = []
        for target in np.linspace(0.1, 0.9, 17):
            sol = invert_kick_map(fitted, float(target))
            achieved = max(0.0, 40000.0 * sol.impulse**2 + rng.normal(0.0, 0.05))
            errors.append(abs(achieved - float(target)))
        inversion_medians.append(float(np.median(errors)))
    for k in range(3):
        mean_err = float(np.mean(norm_errors[k]))
        if mean_err > 0.10:
            failures.append(
                f"coefficient c{k} mean normalized error {mean_err:.3f} > 10% across seeds"
            )
    worst_median = max(inversion_medians)
    if worst_median > 0.1:
        failures.append(f"worst per-seed inversion median {worst_median:.3f} > 0.1 m/s")
    report(
        "kick calibration: quadratic recovered within 10%/coefficient (20-seed mean); "
        "inversion median <= 0.1 m/s",
        failures,
    )


def test_kinematics_roundtrip_and_clamp():
    failures = []
    layout = WheelLayout()
    rng = random.Random(11)
    worst = 0.0
    for _ in range(10_000):
        t = Twist(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-8, 8))
        back = forward_kinematics(layout, inverse_kinematics(layout, t))
        worst = max(
            worst, abs(back.vx - t.vx), abs(back.vy - t.vy), abs(back.omega - t.omega)
        )
    if worst > 1e-9:
        failures.append(f"roundtrip error {worst:.2e} > 1e-9")
    c = clamp_twist(Twist(0.4, 0.0, 0.0))
    if (c.vx, c.vy) != (0.2, 0.0):
        failures.append(f"translation clamp gave {(c.vx, c.vy)}, want exactly (0.2, 0)")
    if clamp_twist(Twist(0, 0, 7.0)).omega != math.pi:
        failures.append("rotation clamp not exactly pi")
    if clamp_twist(Twist(0, 0, -7.0)).omega != -math.pi:
        failures.append("negative rotation clamp not exactly -pi")
    report("kinematics: IK/FK roundtrip <=1e-9 on 1e4 twists; exact clamps", failures)


def test_angle_properties_bulk():
    failures = []
    rng = random.Random(99)
    n = 1_000_000
    bad_range = bad_congruence = bad_error = 0
    for _ in range(n):
        angle = rng.uniform(-1e4, 1e4)
        w = wrap_angle(angle)
        if not (-math.pi < w <= math.pi):
            bad_range += 1
        k = (angle - w) / (2 * math.pi)
        if abs(k - round(k)) > 1e-6:
            bad_congruence += 1
        e = angle_error(rng.uniform(-10, 10), rng.uniform(-10, 10))
        if abs(e) > math.pi:
            bad_error += 1
    if bad_range:
        failures.append(f"{bad_range} wrapped angles out of (-pi, pi]")
    if bad_congruence:
        failures.append(f"{bad_congruence} wraps broke congruence mod 2pi")
    if bad_error:
        failures.append(f"{bad_error} angle errors above pi")
    # the classroom wrap scenario: theta=-3, target=3 turns the short way
    err = angle_error(3.0, -3.0)
    if not (err < 0 and abs(err - (6 - 2 * math.pi)) < 1e-12):
        failures.append(f"theta=-3 -> target=3 gave error {err}")
    report("angles: wrap/error properties on 1e6 samples; -3 -> 3 turns short way", failures)


def test_attacker_geometry_and_goalie():
    failures = []
    rng = random.Random(123)
    worst_cross = worst_d = 0.0
    for _ in range(100_000):
        b = Vec2(rng.uniform(-1, 1), rng.uniform(-1, 1))
        c = Vec2(rng.uniform(-1, 1), rng.uniform(-1, 1))
        if b.distance_to(c) < 1e-3:
            continue
        d = rng.uniform(0.01, 0.5)
        plan = attacker_plan(b, c, d)
        worst_cross = max(worst_cross, abs((c - b).cross(b - plan.target)))
        worst_d = max(worst_d, abs(plan.target.distance_to(b) - d))
    if worst_cross > 1e-12:
        failures.append(f"collinearity violation {worst_cross:.2e} > 1e-12")
    if worst_d > 1e-12:
        failures.append(f"standoff distance violation {worst_d:.2e} > 1e-12")

    field = FieldGeometry()
    half_goal = field.goal_width / 2
    for _ in range(5000):
        pose = Pose2D(rng.uniform(-0.8, 0.3), rng.uniform(-0.5, 0.5), rng.uniform(-3.1, 3.1))
        ball = Vec2(rng.uniform(-0.8, 0.5), rng.uniform(-0.5, 0.5))
        got = goalie_intercept(pose, ball, field)
        inside = -math.pi / 2 < pose.theta < math.pi / 2
        if not inside:
            if got is not None:
                failures.append(f"orientation filter leaked at theta={pose.theta:.3f}")
                break
            continue
        raw = math.tan(pose.theta) * field.half_length + (
            ball.y - math.tan(pose.theta) * ball.x
        )
        want = min(max(raw, -half_goal), half_goal)
        if got is None or abs(got - want) > 1e-9:
            failures.append(f"intercept mismatch: got {got}, want {want}")
            break
        if abs(got) > half_goal + 1e-12:
            failures.append("goal clamp violated")
            break
    report(
        "attacker geometry: collinear + |T-B|=d to 1e-12 on 1e5; goalie matches oracle",
        failures,
    )


def frame_of(t, n, robots, ball):
    dets = tuple(RobotDetection(tm, num, Pose2D(x, y, th)) for tm, num, x, y, th in robots)
    return DetectionFrame(t=t, frame_number=n, robots=dets, ball=ball)


def test_rules_scripted_scenarios():
    failures = []
    field = FieldGeometry()
    dt = 1.0 / 30.0

    # goal hysteresis: oscillation across the line scores exactly once
    eng = RuleEngine(field, RuleParams(), {"green": "a", "blue": "b"}, "r")
    eng.start_engagement()
    eng.run()
    eng.on_detection(frame_of(0.0, 0, [], Vec2(0.8, 0.0)), dt)
    goals = 0
    for i, x in enumerate([0.90, 0.92, 0.90, 0.92, 0.90, 0.92]):
        events = eng.on_detection(frame_of((i + 1) * dt, i + 1, [], Vec2(x, 0.0)), dt)
        goals += sum(isinstance(e, GoalEvent) for e in events)
    if goals != 1:
        failures.append(f"oscillating crossing produced {goals} goals, want 1")

    # ball hold fires at the limit; control resumes after the duration +- one tick
    eng = RuleEngine(
        field, RuleParams(hold_limit=2.0, penalty_duration=3.0), {"green": "a", "blue": "b"}, "r"
    )
    eng.start_engagement()
    eng.run()
    fired_at = released_at = None
    for i in range(400):
        t = i * dt
        events = eng.on_detection(
            frame_of(t, i, [("green", 1, 0.1, 0.0, 0.0)], Vec2(0.0, 0.0)), dt
        )
        if fired_at is None and any(isinstance(e, PenaltyEvent) for e in events):
            fired_at = t
        elif fired_at is not None and released_at is None and ("green", 1) not in eng.penalties:
            released_at = t
        if released_at is not None:
            break
    if fired_at is None or abs(fired_at - 2.0) > dt + 1e-9:
        failures.append(f"penalty fired at {fired_at}, want 2.0 +- one frame")
    if released_at is None or abs((released_at - fired_at) - 3.0) > dt + 1e-9:
        failures.append(f"control resumed after {released_at and released_at - fired_at}")

    # authorization matrix: 2 keys x 4 robots exact
    eng = RuleEngine(field, RuleParams(), {"green": "ka", "blue": "kb"}, "kr")
    for key, team in (("ka", "green"), ("kb", "blue")):
        for rt in ("green", "blue"):
            for num in (1, 2):
                if eng.authorize(key, rt, num) is not (team == rt):
                    failures.append(f"auth({key},{rt},{num}) wrong")

    # halftime swap is an involution
    eng = RuleEngine(field, RuleParams(), {"green": "ka", "blue": "kb"}, "kr")
    eng.start_engagement()
    eng.run()
    eng.halftime()
    before = dict(eng.sides)
    eng.halftime_swap()
    mid = dict(eng.sides)
    eng.halftime_swap()
    if mid == before or dict(eng.sides) != before:
        failures.append("halftime swap is not an involution on sides")
    report("rules: hysteresis, hold penalty timing, auth matrix, swap involution", failures)


@pytest.mark.slow
def test_service_timing_with_eight_clients():
    """Detection broadcast long-run rate within 0.1% of 30 Hz, stall-proof."""
    import threading

    from websockets.sync.client import connect

    from omnisoccer.server import ServiceRunner

    failures = []
    counts = {}
    stop = threading.Event()

    def consume(idx, url):
        import json as _json

        received = 0
        with connect(url) as ws:
            while not stop.is_set():
                try:
                    raw = ws.recv(timeout=0.5)
                except TimeoutError:
                    continue
                if _json.loads(raw)["type"] == "detection":
                    received += 1
        counts[idx] = received

    with ServiceRunner(fresh_config(), port=0) as svc:
        url = svc.url
        threads = [
            threading.Thread(target=consume, args=(i, url), daemon=True) for i in range(7)
        ]
        stalled = connect(url)  # 8th client: never reads
        for t in threads:
            t.start()
        time.sleep(15.0)
        stop.set()
        for t in threads:
            t.join(timeout=5)
        stalled.close()
        emits = list(svc.server.emit_wall_times)
        dropped = svc.server.dropped_frames

    rate = (len(emits) - 1) / (emits[-1] - emits[0])
    if abs(rate - 30.0) / 30.0 > 0.001:
        failures.append(f"long-run rate {rate:.4f} Hz deviates more than 0.1% from 30")
    intervals = [b - a for a, b in zip(emits, emits[1:])]
    if max(intervals) > 0.1:
        failures.append(f"control loop stalled: max inter-frame gap {max(intervals):.3f} s")
    healthy = [counts[i] for i in sorted(counts)]
    if min(healthy) < 14.0 * 30:
        failures.append(f"a healthy client starved: frame counts {healthy}")
    if dropped == 0:
        failures.append("stalled client never hit the bounded queue (test inert)")
    report(
        "service timing: 8 clients, 30 Hz within 0.1%, stalled client dropped not stalling",
        failures,
    )


def test_full_stack_determinism(tmp_path):
    failures = []
    logs = []
    for run in range(2):
        path = tmp_path / f"det-{run}.jsonl"
        run_match(
            fresh_config(seed=2024),
            green=("attacker", "idle"),
            blue=("idle", "goalie"),
            duration=30.0,
            replay_path=path,
        )
        logs.append(path)
    if logs[0].read_bytes() != logs[1].read_bytes():
        failures.append("two seeded runs produced different replay logs")
    rep = verify_replay(logs[0])
    if not rep.ok:
        failures.append(f"replay verify found {len(rep.divergences)} divergences")
    if rep.frames == 0:
        failures.append("verify saw no frames")
    report("full-stack determinism: bit-identical logs; verify zero divergences", failures)


def _empty_goal_attacker_run(seed: int) -> float:
    """Attacker vs a truly empty defending side; returns first-goal time."""
    cfg = fresh_config(seed=seed)
    controller = GameController(cfg)
    ref = LoopbackClient(controller, "kr", name="ref")
    from omnisoccer.strategies import AttackerBehavior

    attacker = LoopbackClient(
        controller, "kg", AttackerBehavior("green", 1, cfg.field), name="attacker"
    )
    ref.submit("referee", {"action": "engage"})
    controller.advance_frame()
    # park every other robot out of play, against the margin walls
    spots = [(-1.05, 0.65), (1.05, 0.65), (1.05, -0.65)]
    for (team, number), (x, y) in zip(
        [("green", 2), ("blue", 1), ("blue", 2)], spots
    ):
        ref.submit(
            "referee",
            {"action": "teleport_robot", "team": team, "number": number,
             "x": x, "y": y, "theta": 0.0},
        )
        ref.submit("referee", {"action": "preempt", "team": team, "number": number})
    controller.advance_frame()
    ref.submit("referee", {"action": "run"})
    controller.advance_frame()
    for client in (ref, attacker):
        client.pump()
    for _ in range(int(120 * 30)):
        controller.advance_frame()
        ref.pump()
        attacker.pump()
        if attacker.goals:
            controller.close()
            return attacker.goals[0]["t"]
        attacker.act()
    controller.close()
    return math.inf


def test_attacker_scores_empty_goal():
    failures = []
    t_goal = _empty_goal_attacker_run(seed=7)
    if not t_goal < 120.0:
        failures.append("attacker failed to score within 2 simulated minutes")
    report(f"pedagogy: attacker scores vs empty goal (t={t_goal:.1f} s < 120 s)", failures)


def _interception_time(seed: int, use_prediction: bool) -> float:
    """Chase a 1 m/s rolling ball; time until the robot reaches it."""
    rng = random.Random(seed)
    field = FieldGeometry()
    params = SimParams(
        detection_mode="none", kick_noise_sigma=0.0, borderless=True, team_size=1,
        watchdog=10.0,
    )
    world = World(field, params, seed=seed)
    # ball rolls diagonally 2.0 m corner to corner; robot starts mid-field
    start = Vec2(-0.82, -0.52)
    heading = bearing(start, Vec2(0.82, 0.52))
    world.teleport_robot(
        "blue", 1, Pose2D(1.05, -0.65, 0.0)
    )  # opponent parked out of play
    robot_start = Pose2D(
        rng.uniform(0.1, 0.5), rng.uniform(-0.45, -0.1), rng.uniform(-3, 3)
    )
    world.teleport_robot("green", 1, robot_start)
    world.teleport_ball(start)
    world.ball = BallState(start, Vec2(math.cos(heading), math.sin(heading)))

    chaser = ChaserBehavior("green", 1, use_prediction=use_prediction)
    game_state = {"phase": "running", "sides": {"green": -1, "blue": 1}}
    capture = params.robot_radius + params.ball_radius + 0.02
    frame_number = 0
    for _ in range(int(30 * 30)):
        frame_number += 1
        frame = world.emit_detection(frame_number)
        for msg_type, data in chaser.step(frame, game_state):
            if msg_type == "command":
                world.command_robot(
                    data["team"], data["number"],
                    Twist(data["vx"], data["vy"], data["omega"]),
                )
        for _ in range(params.ticks_per_frame):
            world.step()
            if world.robot("green", 1).pose.position.distance_to(world.ball.pos) <= capture:
                return world.time
    return math.inf


def test_prediction_intercepts_faster():
    failures = []
    wins = 0
    pred_times = []
    naive_times = []
    for seed in range(10):
        with_pred = _interception_time(seed, use_prediction=True)
        without = _interception_time(seed, use_prediction=False)
        pred_times.append(with_pred)
        naive_times.append(without)
        if with_pred < without:
            wins += 1
    mean_pred = sum(pred_times) / len(pred_times)
    mean_naive = sum(naive_times) / len(naive_times)
    if not mean_pred < mean_naive:
        failures.append(
            f"prediction not faster on average: {mean_pred:.2f} vs {mean_naive:.2f} s"
        )
    if wins < 7:
        failures.append(f"prediction won only {wins}/10 seeded episodes")
    report(
        f"pedagogy: stop-point interception faster ({mean_pred:.2f} s vs {mean_naive:.2f} s, "
        f"{wins}/10 episodes)",
        failures,
    )
