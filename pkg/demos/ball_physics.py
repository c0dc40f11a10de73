"""Ball dynamics walkthrough: kick, roll, predict, and the speed curve.

A kicked ball decelerates at a roughly constant 0.25 m/s^2, so a 1 m/s
kick rolls for 4 seconds and 2 meters. Knowing that, the rest point can
be predicted the instant the ball starts moving, which is what lets a
robot drive to where the ball is *going to be*.

Run:  python3 demos/ball_physics.py       (writes demos/out/ball_speed.png)
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from omnisoccer import BallState, DecelModel, Vec2, predict_stop, step_ball
from omnisoccer.world import FieldGeometry, SimParams, World
from omnisoccer.geometry import Pose2D

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

# -- closed form ---------------------------------------------------------

model = DecelModel(0.25)
ball = BallState(Vec2(0.0, 0.0), Vec2(1.0, 0.0))
stop = predict_stop(ball, model)
print(f"1 m/s kick: stops after {stop.t_stop:.2f} s at x = {stop.pos.x:.3f} m")

after_1s = step_ball(ball, model, 1.0)
print(f"state after 1 s: pos x = {after_1s.pos.x:.4f} m, speed = {after_1s.speed():.3f} m/s")

# -- the same thing through the full simulator, sampled at the vision rate --

field = FieldGeometry(length=6.0, width=3.0, goal_width=0.6, margin=0.5)
params = SimParams(detection_mode="gaussian", kick_noise_sigma=0.0, borderless=True)
world = World(field, params, seed=1)
for team, number, y in (("green", 2, 1.0), ("blue", 1, -1.0), ("blue", 2, 1.2)):
    world.teleport_robot(team, number, Pose2D(-2.5, y, 0.0))
world.teleport_robot("green", 1, Pose2D(-2.4, 0.0, 0.0))
world.teleport_ball(Vec2(-2.4 + params.robot_radius + params.ball_radius + 0.005, 0.0))
world.kick("green", 1, 0.005)

track = []
for frame_number in range(1, 160):
    for _ in range(params.ticks_per_frame):
        world.step()
    frame = world.emit_detection(frame_number)
    track.append((frame.t, frame.ball))

# finite-difference speed estimates, like a client would compute from logs
span = 4
times, speeds = [], []
for i in range(span, len(track)):
    t0, p0 = track[i - span]
    t1, p1 = track[i]
    times.append((t0 + t1) / 2)
    speeds.append(p0.distance_to(p1) / (t1 - t0))

moving = [(t, s) for t, s in zip(times, speeds) if 0.15 < s < 0.9]
slope, intercept = np.polyfit([m[0] for m in moving], [m[1] for m in moving], 1)
print(f"fitted deceleration from noisy 30 Hz detections: {slope:.3f} m/s^2")

fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(times, speeds, ".", markersize=4, label="finite-difference estimate")
tt = np.linspace(0, 4.2, 50)
ax.plot(tt, np.clip(1.0 - 0.25 * tt, 0, None), "-", label="constant deceleration model")
ax.set_xlabel("time after kick (s)")
ax.set_ylabel("ball speed (m/s)")
ax.legend()
ax.set_title("estimated ball speed vs time after a full-power kick")
fig.tight_layout()
fig.savefig(OUT / "ball_speed.png", dpi=120)
print(f"wrote {OUT / 'ball_speed.png'}")
