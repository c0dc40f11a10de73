import json
import math
import random

import pytest

from omnisoccer.config import load_config
from omnisoccer.protocol import WireMessage, encode
from omnisoccer.server import ServiceRunner
from websockets.sync.client import connect as ws_connect


@pytest.fixture(scope="module")
def service():
    """A live service, sped up so sim-time tests finish quickly."""
    with ServiceRunner(load_config(None), port=0, speed=20.0) as svc:
        yield svc


class RefereeDriver:
    """Minimal raw-socket referee for test choreography."""

    def __init__(self, svc):
        self.ws = ws_connect(svc.url)
        self.seq = 0
        self.ws.recv(timeout=5)  # hello
        self.send("auth", {"key": svc.keys["referee"]})

    def send(self, msg_type, data):
        self.seq += 1
        self.ws.send(encode(WireMessage(msg_type, self.seq, 0.0, data)))

    def action(self, name, **kw):
        self.send("referee", {"action": name, **kw})

    def start_running(self):
        self.action("engage")
        self.action("run")

    def park_all_but(self, keep=("green", 1), spots=None):
        spots = spots or [(-1.05, 0.65), (1.05, 0.65), (1.05, -0.65)]
        parked = [p for p in [("green", 1), ("green", 2), ("blue", 1), ("blue", 2)]
                  if p != tuple(keep)]
        for (team, number), (x, y) in zip(parked, spots):
            self.action("teleport_robot", team=team, number=number, x=x, y=y, theta=0.0)
            self.action("preempt", team=team, number=number)

    def close(self):
        self.ws.close()


@pytest.fixture
def referee(service):
    driver = RefereeDriver(service)
    yield driver
    driver.close()
