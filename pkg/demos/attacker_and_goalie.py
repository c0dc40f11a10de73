"""Strategy geometry walkthrough: the standoff plan and the goalie line.

The attacker problem: given ball B and opponent goal center C, drive to a
point T at distance d behind the ball on the B-C line, facing C; a short
forward nudge then puts the ball on the kicker. The goalie problem is the
mirror image: extend the attacker's heading as a line through the ball
and hold the goal line where that line lands, capped between the posts.

Run:  python3 demos/attacker_and_goalie.py  (writes demos/out/geometry.png)
"""

import math
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from omnisoccer import FieldGeometry, Pose2D, Vec2
from omnisoccer.strategies import attacker_plan, goalie_intercept

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

field = FieldGeometry()
goal_center = field.goal_center(1)

ball = Vec2(0.1, -0.25)
plan = attacker_plan(ball, goal_center, standoff=0.18)
print(f"ball at ({ball.x}, {ball.y}), goal center at ({goal_center.x:.3f}, 0)")
print(f"approach point T = ({plan.target.x:.3f}, {plan.target.y:.3f}), "
      f"heading alpha = {math.degrees(plan.alpha):.1f} deg")

attacker = Pose2D(plan.target.x, plan.target.y, plan.alpha)
y_block = goalie_intercept(attacker, ball, field)
print(f"goalie blocks at y = {y_block:.3f} m on the goal line")

away = Pose2D(0.0, 0.0, 2.5)
print(f"attacker facing away (theta=2.5 rad) -> intercept = "
      f"{goalie_intercept(away, ball, field)} (ignored)")

fig, ax = plt.subplots(figsize=(8, 5))
hl, hw, hg = field.half_length, field.half_width, field.goal_width / 2
ax.plot([-hl, hl, hl, -hl, -hl], [-hw, -hw, hw, hw, -hw], "g-")
ax.plot([hl, hl], [-hg, hg], "r-", linewidth=4, alpha=0.5, label="goal mouth")
ax.plot(ball.x, ball.y, "o", c="orange", markersize=10, label="ball B")
ax.plot(goal_center.x, goal_center.y, "r*", markersize=12, label="goal center C")
ax.plot(plan.target.x, plan.target.y, "bs", label="approach point T")
ax.annotate("", xy=(goal_center.x, goal_center.y), xytext=(plan.target.x, plan.target.y),
            arrowprops=dict(arrowstyle="->", color="gray", linestyle="--"))
ax.plot(hl - 0.06, y_block, "kD", markersize=9, label="goalie block point")
ax.set_aspect("equal")
ax.legend(loc="upper left", fontsize=8)
ax.set_title("attacker standoff plan and goalie intercept")
fig.tight_layout()
fig.savefig(OUT / "geometry.png", dpi=120)
print(f"wrote {OUT / 'geometry.png'}")
