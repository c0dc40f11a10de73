"""A complete scripted match, recorded and re-verified.

Runs a seeded two-half match between reference strategies over the
in-process wire protocol, writes the replay log, then re-runs the rule
engine over the log to confirm the recorded game evolution is exactly
reproducible.

Run:  python3 demos/scripted_match.py   (writes demos/out/match.jsonl)
"""

import pathlib

from omnisoccer import load_config, run_match, verify_replay
from omnisoccer.config import RunConfig

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)
log_path = OUT / "match.jsonl"

base = load_config(None)
cfg = RunConfig(
    field=base.field,
    sim=base.sim,
    rules=base.rules,
    server=base.server,
    keys={"green": "demo-green", "blue": "demo-blue", "referee": "demo-referee"},
    seed=42,
    command_rate_limit=base.command_rate_limit,
)

result = run_match(
    cfg,
    green=("attacker", "goalie"),
    blue=("goalie", "idle"),
    duration=90.0,
    replay_path=log_path,
)
print(f"final score: green {result.score['green']} : {result.score['blue']} blue")
print(f"{result.frames} frames over {result.sim_time:.1f} simulated seconds")
for goal in result.goals:
    print(f"  goal by {goal['team']:5s} at t = {goal['t']:6.2f} s")
for pen in result.penalties:
    print(f"  ball-hold penalty: {pen['team']} {pen['number']} ({pen['duration']} s)")

report = verify_replay(log_path)
print(f"\nreplay verification: {report.frames} frames, {report.goals} goals, "
      f"{len(report.divergences)} divergences")
assert report.ok
print(f"log at {log_path} (view it back with: omnisoccer replay {log_path})")
