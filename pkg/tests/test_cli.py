import json
import socket
import threading
import time

import pytest
from click.testing import CliRunner

from omnisoccer.ball import load_kick_samples, save_kick_samples, KickSample
from omnisoccer.cli import main, simulate_kick_samples
from omnisoccer.config import default_config_text


@pytest.fixture
def runner():
    return CliRunner()


class TestHelp:
    @pytest.mark.parametrize(
        "command", [[], ["serve"], ["demo"], ["replay"], ["calibrate-kick"], ["check-config"]]
    )
    def test_help_exits_zero(self, runner, command):
        result = runner.invoke(main, command + ["--help"])
        assert result.exit_code == 0
        assert "--help" in result.output

    def test_usage_error_exit_two(self, runner):
        result = runner.invoke(main, ["demo", "--green", "wizard"])
        assert result.exit_code == 2
        assert "unknown strategy" in result.output


class TestCheckConfig:
    def test_defaults_printed(self, runner):
        result = runner.invoke(main, ["check-config"])
        assert result.exit_code == 0
        assert "[field]" in result.output

    def test_valid_file(self, runner, tmp_path):
        path = tmp_path / "ok.toml"
        path.write_text(default_config_text())
        result = runner.invoke(main, ["check-config", str(path)])
        assert result.exit_code == 0
        assert "ok:" in result.output

    def test_corrupt_config_names_field(self, runner, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text('[field]\nlength = "nope"\n')
        result = runner.invoke(main, ["check-config", str(path)])
        assert result.exit_code == 1
        assert "field.length" in result.output

    def test_write_defaults(self, runner, tmp_path):
        out = tmp_path / "written.toml"
        result = runner.invoke(main, ["check-config", "--write-defaults", str(out)])
        assert result.exit_code == 0
        assert out.exists()


class TestDemoCommand:
    def test_demo_prints_score_and_replay(self, runner, tmp_path):
        log = tmp_path / "match.jsonl"
        result = runner.invoke(
            main,
            [
                "demo", "--seed", "5", "--green", "attacker,idle",
                "--blue", "idle,goalie", "--duration", "30",
                "--replay-out", str(log),
            ],
        )
        assert result.exit_code == 0, result.output
        assert "final score" in result.output
        assert log.exists()

    def test_replay_verify_of_demo(self, runner, tmp_path):
        log = tmp_path / "match.jsonl"
        r1 = runner.invoke(
            main,
            ["demo", "--seed", "5", "--green", "attacker,idle", "--blue", "idle,idle",
             "--duration", "20", "--replay-out", str(log)],
        )
        assert r1.exit_code == 0, r1.output
        r2 = runner.invoke(main, ["replay", str(log), "--verify"])
        assert r2.exit_code == 0, r2.output
        assert "zero divergences" in r2.output

    def test_missing_log(self, runner):
        result = runner.invoke(main, ["replay", "/tmp/never-ever.jsonl", "--verify"])
        assert result.exit_code == 1


class TestCalibrateKick:
    def test_simulated_noise_free_recovers_truth(self, runner):
        result = runner.invoke(
            main, ["calibrate-kick", "--simulate", "50", "--noise", "0", "--seed", "1"]
        )
        assert result.exit_code == 0, result.output
        line = [l for l in result.output.splitlines() if l.startswith("speed(t)")][0]
        assert "40000" in line

    def test_csv_input(self, runner, tmp_path):
        path = tmp_path / "kicks.csv"
        save_kick_samples(
            path, [KickSample(0.0005 * i, 0.01 * (i * i)) for i in range(1, 8)]
        )
        result = runner.invoke(main, ["calibrate-kick", "--csv", str(path)])
        assert result.exit_code == 0, result.output
        assert "impulse lookup" in result.output

    def test_two_sample_csv_insufficient_for_inversion(self, runner, tmp_path):
        # a single distinct impulse gives a constant map: degree 0
        path = tmp_path / "tiny.csv"
        path.write_text("impulse_s,speed_mps\n0.003,0.5\n0.003,0.6\n")
        result = runner.invoke(main, ["calibrate-kick", "--csv", str(path)])
        assert result.exit_code == 0
        assert "fit degree: 0" in result.output

    def test_empty_csv_errors(self, runner, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("impulse_s,speed_mps\n")
        result = runner.invoke(main, ["calibrate-kick", "--csv", str(path)])
        assert result.exit_code == 1
        assert "insufficient" in result.output.lower()

    def test_both_sources_usage_error(self, runner):
        result = runner.invoke(main, ["calibrate-kick"])
        assert result.exit_code == 2

    def test_sample_export(self, runner, tmp_path):
        out = tmp_path / "out.csv"
        result = runner.invoke(
            main, ["calibrate-kick", "--simulate", "20", "--out", str(out)]
        )
        assert result.exit_code == 0
        assert len(load_kick_samples(out)) == 20


class TestSimulateKickSamples:
    def test_impulse_classes(self):
        samples = simulate_kick_samples(20, seed=0, noise_sigma=0.0)
        impulses = sorted({s.impulse for s in samples})
        assert len(impulses) == 10
        assert impulses[0] == pytest.approx(0.0005)
        assert impulses[-1] == pytest.approx(0.005)

    def test_noise_free_on_curve(self):
        for s in simulate_kick_samples(30, seed=0, noise_sigma=0.0):
            assert s.speed == pytest.approx(40000 * s.impulse**2, abs=1e-9)


class TestServeCommand:
    def test_occupied_port_exit_one(self, runner):
        blocker = socket.socket()
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        try:
            result = runner.invoke(main, ["serve", "--port", str(port)])
            assert result.exit_code == 1
            assert str(port) in result.output
        finally:
            blocker.close()

    def test_missing_config_warns_and_would_run(self, runner):
        # use an occupied port so serve exits right after config handling
        blocker = socket.socket()
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        try:
            result = runner.invoke(
                main, ["serve", "--config", "/tmp/missing-config.toml", "--port", str(port)]
            )
            assert "warning" in result.output.lower()
        finally:
            blocker.close()
