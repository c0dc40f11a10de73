import json
import time
import urllib.request

import pytest
from websockets.sync.client import connect

from omnisoccer.config import load_config
from omnisoccer.protocol import WireMessage, encode
from omnisoccer.server import ServiceRunner


def make_config():
    return load_config(None)


@pytest.fixture
def service():
    with ServiceRunner(make_config(), port=0) as svc:
        yield svc


@pytest.fixture
def fast_service():
    with ServiceRunner(make_config(), port=0, speed=20.0) as svc:
        yield svc


def recv_until(ws, msg_type, timeout=5.0, wire=None):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        raw = ws.recv(timeout=timeout)
        msg = json.loads(raw)
        if msg["type"] == msg_type:
            return msg, raw
    raise TimeoutError(f"no {msg_type} within {timeout}s")


class TestSessions:
    def test_hello_then_detections(self, service):
        with connect(service.url) as ws:
            hello = json.loads(ws.recv(timeout=5))
            assert hello["type"] == "hello"
            det, _ = recv_until(ws, "detection")
            assert len(det["data"]["robots"]) == 4

    def test_auth_over_socket(self, service):
        with connect(service.url) as ws:
            ws.recv(timeout=5)
            ws.send(encode(WireMessage("auth", 1, 0.0, {"key": service.keys["blue"]})))
            ack, _ = recv_until(ws, "ack")
            assert ack["data"]["info"]["team"] == "blue"

    def test_disconnected_session_pruned(self, service):
        with connect(service.url) as ws:
            ws.recv(timeout=5)
        time.sleep(0.3)
        assert len(service.controller.sessions) == 0


class TestBroadcast:
    def test_three_clients_byte_identical_frames(self, fast_service):
        sockets = [connect(fast_service.url) for _ in range(3)]
        try:
            raws = []
            for ws in sockets:
                while True:
                    raw = ws.recv(timeout=5)
                    msg = json.loads(raw)
                    if msg["type"] == "detection" and msg["data"]["frame"] == 10:
                        raws.append(raw)
                        break
            assert raws[0] == raws[1] == raws[2]
        finally:
            for ws in sockets:
                ws.close()

    def test_detection_rate_sanity(self, service):
        with connect(service.url) as ws:
            ws.recv(timeout=5)
            recv_until(ws, "detection")
            time.sleep(3.0)
        emits = list(service.server.emit_wall_times)
        assert len(emits) >= 60
        rate = (len(emits) - 1) / (emits[-1] - emits[0])
        assert rate == pytest.approx(30.0, rel=0.02)

    def test_stalled_client_does_not_stall_loop(self, service):
        stalled = connect(service.url)
        healthy = connect(service.url)
        try:
            healthy.recv(timeout=5)
            # stalled never reads; let queues + socket buffers fill
            frames = 0
            deadline = time.monotonic() + 8.0
            last = None
            while time.monotonic() < deadline:
                msg = json.loads(healthy.recv(timeout=5))
                if msg["type"] == "detection":
                    frames += 1
                    last = msg["data"]["frame"]
            assert frames >= 8.0 * 30 * 0.9
            emits = list(service.server.emit_wall_times)
            intervals = [b - a for a, b in zip(emits[-120:], emits[-119:])]
            assert max(intervals) < 0.2  # no multi-frame stall
        finally:
            stalled.close()
            healthy.close()


class TestCommandsOverSocket:
    def test_command_moves_robot(self, fast_service):
        keys = fast_service.keys
        with connect(fast_service.url) as ref, connect(fast_service.url) as ws:
            ref.recv(timeout=5)
            ref.send(encode(WireMessage("auth", 1, 0.0, {"key": keys["referee"]})))
            ref.send(encode(WireMessage("referee", 2, 0.0, {"action": "engage"})))
            ref.send(encode(WireMessage("referee", 3, 0.0, {"action": "run"})))
            ws.recv(timeout=5)
            ws.send(encode(WireMessage("auth", 1, 0.0, {"key": keys["green"]})))
            recv_until(ws, "ack")
            x0 = fast_service.controller.world.robot("green", 1).pose.x
            for i in range(40):
                ws.send(
                    encode(
                        WireMessage(
                            "command",
                            2 + i,
                            0.0,
                            {"team": "green", "number": 1, "vx": 0.15, "vy": 0, "omega": 0},
                        )
                    )
                )
                time.sleep(0.02)
            x1 = fast_service.controller.world.robot("green", 1).pose.x
            assert x1 > x0 + 0.05

    def test_two_team_keys_isolated(self, fast_service):
        keys = fast_service.keys
        with connect(fast_service.url) as g, connect(fast_service.url) as b:
            for ws, key in ((g, keys["green"]), (b, keys["blue"])):
                ws.recv(timeout=5)
                ws.send(encode(WireMessage("auth", 1, 0.0, {"key": key})))
                recv_until(ws, "ack")
            g.send(
                encode(
                    WireMessage(
                        "command", 2, 0.0,
                        {"team": "blue", "number": 1, "vx": 0.1, "vy": 0, "omega": 0},
                    )
                )
            )
            nack, _ = recv_until(g, "nack")
            assert nack["data"]["reason"] == "unauthorized"


class TestStaticConsole:
    def test_static_assets_served(self, tmp_path):
        (tmp_path / "index.html").write_text("<html>console</html>")
        (tmp_path / "app.js").write_text("console.log('hi')")
        with ServiceRunner(make_config(), port=0, static_root=str(tmp_path)) as svc:
            base = f"http://127.0.0.1:{svc.port}"
            body = urllib.request.urlopen(f"{base}/").read()
            assert b"console" in body
            js = urllib.request.urlopen(f"{base}/app.js")
            assert js.headers["Content-Type"].startswith("text/javascript")
            with pytest.raises(urllib.error.HTTPError) as err:
                urllib.request.urlopen(f"{base}/missing.js")
            assert err.value.code == 404

    def test_no_console_404(self, service):
        with pytest.raises(urllib.error.HTTPError) as err:
            urllib.request.urlopen(f"http://127.0.0.1:{service.port}/")
        assert err.value.code == 404

    def test_traversal_blocked(self, tmp_path):
        (tmp_path / "index.html").write_text("ok")
        with ServiceRunner(make_config(), port=0, static_root=str(tmp_path)) as svc:
            req = urllib.request.Request(
                f"http://127.0.0.1:{svc.port}/../../etc/passwd"
            )
            with pytest.raises(urllib.error.HTTPError) as err:
                urllib.request.urlopen(req)
            assert err.value.code in (403, 404)


class TestPortConflict:
    def test_bind_failure_raises(self):
        with ServiceRunner(make_config(), port=0) as svc:
            taken = svc.port
            doomed = ServiceRunner(make_config(), port=taken)
            with pytest.raises(OSError):
                doomed.start()
