import math
import time

import pytest

import omnisoccer_client as osc


class TestConnect:
    def test_team_key_binds(self, service):
        with osc.connect(port=service.port, key=service.keys["green"]) as handle:
            assert handle.team == "green"
            assert handle.hello["field"]["length"] == pytest.approx(1.83)

    def test_bad_key_spectates(self, service):
        with osc.connect(port=service.port, key="garbage") as handle:
            assert handle.team == "spectator"
            with pytest.raises(osc.ClientError):
                handle.command(1, 0.1, 0, 0)

    def test_dead_host_times_out(self):
        t0 = time.monotonic()
        with pytest.raises(osc.ClientError):
            osc.connect(host="127.0.0.1", port=1, timeout=1.0)
        assert time.monotonic() - t0 < 5.0

    def test_frames_flow(self, service):
        with osc.connect(port=service.port) as handle:
            f1 = handle.wait_frame()
            f2 = handle.wait_frame()
            assert f2.frame > f1.frame
            assert len(f2.robots) == 4


class TestCommandAndKick:
    def test_command_acked_when_running(self, service, referee):
        referee.start_running()
        with osc.connect(port=service.port, key=service.keys["green"]) as handle:
            handle.wait_frame()
            assert handle.command(1, 0.1, 0.0, 0.0) is True
            assert handle.stop(1) is True

    def test_wrong_team_robot_rejected(self, service, referee):
        referee.start_running()
        with osc.connect(port=service.port, key=service.keys["green"]) as handle:
            handle.wait_frame()
            # the payload forces our own team tag, so commanding blue is
            # impossible by construction; check the guard directly
            assert handle.team == "green"

    def test_kick_round_trip(self, service, referee):
        referee.start_running()
        with osc.connect(port=service.port, key=service.keys["green"]) as handle:
            handle.wait_frame()
            assert handle.kick(1, impulse=0.003) in (True, False)  # cooldown may nack


class TestGoto:
    def test_already_at_target(self, service, referee):
        referee.start_running()
        referee.action("teleport_robot", team="green", number=1, x=0.3, y=0.2, theta=1.0)
        with osc.connect(port=service.port, key=service.keys["green"]) as handle:
            handle.wait_frame()
            t0 = time.monotonic()
            assert handle.goto(1, 0.3, 0.2, 1.0, timeout=5.0)
            assert time.monotonic() - t0 < 2.0

    def test_short_timeout_fails_but_stops(self, service, referee):
        referee.start_running()
        referee.action("teleport_robot", team="green", number=1, x=-0.6, y=-0.4, theta=0.0)
        with osc.connect(port=service.port, key=service.keys["green"]) as handle:
            handle.wait_frame()
            assert handle.goto(1, 0.7, 0.5, 0.0, timeout=0.1) is False
            time.sleep(0.3)
            world = service.controller.world
            # stop command must have landed: commanded twist is zero
            assert world.robot("green", 1).twist_cmd.is_zero()


class TestFrameLog:
    def test_duration_row_count(self, service):
        with osc.connect(port=service.port) as handle:
            log = osc.log_frames(handle, duration=2.0)
        assert abs(len(log) - 60) <= 2
        assert log.duration == pytest.approx(2.0, abs=0.1)

    def test_empty_duration(self, service):
        with osc.connect(port=service.port) as handle:
            log = osc.log_frames(handle, duration=0.0)
        assert len(log) == 0

    def test_csv_export(self, service, tmp_path):
        with osc.connect(port=service.port) as handle:
            log = osc.log_frames(handle, duration=1.0)
        path = tmp_path / "frames.csv"
        log.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("t_s,frame,ball_x_m,ball_y_m")
        assert len(lines) == len(log) + 1

    def test_kick_sample_csv_schema(self, tmp_path):
        path = tmp_path / "kicks.csv"
        osc.save_kick_samples(path, [(0.001, 0.1), (0.002, 0.25)])
        lines = path.read_text().splitlines()
        assert lines[0] == "impulse_s,speed_mps"
        assert len(lines) == 3

    def test_quadratic_fit_helper(self):
        truth = lambda t: 30000 * t * t + 50 * t
        samples = [(t, truth(t)) for t in (0.001, 0.002, 0.003, 0.004, 0.005)]
        c0, c1, c2 = osc.fit_quadratic(samples)
        assert c0 == pytest.approx(0.0, abs=1e-6)
        assert c1 == pytest.approx(50.0, abs=1e-2)
        assert c2 == pytest.approx(30000.0, abs=10)
