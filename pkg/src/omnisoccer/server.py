"""WebSocket front end for the Game Controller.

One asyncio event loop hosts everything: the frame loop wakes on a
drift-free absolute schedule (so the long-run detection rate tracks the
configured 30 Hz), session handlers feed inbound text into the
controller's mailbox, and per-session sender tasks drain bounded queues.
A stalled consumer loses its oldest frames instead of stalling the loop.

The optional static root serves the operator console over plain HTTP on
the same port; the WebSocket API itself lives at `/api`.
"""

from __future__ import annotations

import asyncio
import threading
import time
from collections import deque
from pathlib import Path
from typing import Optional

from websockets.asyncio.server import serve
from websockets.datastructures import Headers
from websockets.exceptions import ConnectionClosed
from websockets.http11 import Response

from .config import RunConfig
from .controller import GameController
from .protocol import encode

API_PATH = "/api"

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
}


class GameServer:
    """Runs one controller's frame loop and its WebSocket sessions."""

    def __init__(
        self,
        controller: GameController,
        host: str = "127.0.0.1",
        port: int = 7401,
        speed: float = 1.0,
        queue_bound: int = 8,
        static_root: Optional[str] = None,
    ) -> None:
        if speed <= 0:
            raise ValueError("speed factor must be positive")
        self.controller = controller
        self.host = host
        self.port = port
        self.speed = speed
        self.queue_bound = queue_bound
        self.static_root = Path(static_root) if static_root else None
        self.bound_port: Optional[int] = None
        self.emit_wall_times: deque = deque(maxlen=100_000)
        self.dropped_frames = 0
        self._queues: dict = {}
        self._stop: Optional[asyncio.Event] = None
        self._loop: Optional[asyncio.AbstractEventLoop] = None
        self._started = threading.Event()
        self.startup_error: Optional[BaseException] = None

    # -- lifecycle ------------------------------------------------------------

    async def run(self) -> None:
        """Serve until `shutdown` is called; raises on bind failure."""
        self._stop = asyncio.Event()
        self._loop = asyncio.get_running_loop()
        try:
            async with serve(
                self._handler,
                self.host,
                self.port,
                process_request=self._process_request,
                close_timeout=1.0,  # rude peers must not delay shutdown
            ) as ws_server:
                sockets = ws_server.server.sockets
                self.bound_port = sockets[0].getsockname()[1]
                self._started.set()
                await self._frame_loop()
        except BaseException as exc:
            self.startup_error = exc
            self._started.set()
            raise

    def shutdown(self) -> None:
        """Thread-safe stop request."""
        if self._loop is not None and self._stop is not None:
            self._loop.call_soon_threadsafe(self._stop.set)

    def wait_started(self, timeout: float = 5.0) -> None:
        if not self._started.wait(timeout):
            raise TimeoutError("server did not start in time")
        if self.startup_error is not None:
            raise self.startup_error

    # -- frame loop -------------------------------------------------------------

    async def _frame_loop(self) -> None:
        period = self.controller.frame_dt / self.speed
        next_deadline = time.perf_counter() + period
        while not self._stop.is_set():
            delay = next_deadline - time.perf_counter()
            if delay > 0:
                try:
                    await asyncio.wait_for(self._stop.wait(), timeout=delay)
                    break
                except asyncio.TimeoutError:
                    pass
            else:
                # running behind (or faster than real time): still yield so
                # session handlers get scheduled
                await asyncio.sleep(0)
                if delay < -1.0:
                    # hopelessly behind: resync instead of spinning a backlog
                    next_deadline = time.perf_counter()
            next_deadline += period
            self.controller.advance_frame()
            self.emit_wall_times.append(time.perf_counter())
            self._pump_outboxes()

    def _pump_outboxes(self) -> None:
        for sid, queue in list(self._queues.items()):
            for msg in self.controller.drain_outbox(sid):
                if queue.full():
                    # slow consumer: drop its oldest message, never block
                    queue.get_nowait()
                    self.dropped_frames += 1
                queue.put_nowait(encode(msg))

    # -- sessions -----------------------------------------------------------------

    async def _handler(self, websocket) -> None:
        sid = self.controller.connect()
        queue: asyncio.Queue = asyncio.Queue(maxsize=self.queue_bound)
        self._queues[sid] = queue
        sender = asyncio.create_task(self._sender(websocket, queue))
        try:
            async for raw in websocket:
                if isinstance(raw, bytes):
                    raw = raw.decode("utf-8", errors="replace")
                self.controller.submit(sid, raw)
        except ConnectionClosed:
            pass
        finally:
            sender.cancel()
            self._queues.pop(sid, None)
            self.controller.disconnect(sid)

    async def _sender(self, websocket, queue: asyncio.Queue) -> None:
        try:
            while True:
                text = await queue.get()
                await websocket.send(text)
        except (ConnectionClosed, asyncio.CancelledError):
            pass

    # -- static console assets ---------------------------------------------------

    def _process_request(self, connection, request):
        if request.path == API_PATH or request.path.startswith(API_PATH + "?"):
            return None  # continue the WebSocket handshake
        if self.static_root is None:
            return _plain_response(404, "not found (WebSocket API is at /api)")
        name = request.path.split("?")[0].lstrip("/") or "index.html"
        target = (self.static_root / name).resolve()
        root = self.static_root.resolve()
        if root not in target.parents and target != root:
            return _plain_response(403, "forbidden")
        if not target.is_file():
            return _plain_response(404, "not found")
        content_type = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        return Response(
            200,
            "OK",
            Headers([("Content-Type", content_type)]),
            target.read_bytes(),
        )


def _plain_response(status: int, text: str) -> Response:
    reasons = {403: "Forbidden", 404: "Not Found"}
    return Response(
        status,
        reasons.get(status, "Error"),
        Headers([("Content-Type", "text/plain; charset=utf-8")]),
        (text + "\n").encode(),
    )


class ServiceRunner:
    """Owns a controller + server on a background thread (tests, CLI, SDK)."""

    def __init__(
        self,
        config: RunConfig,
        replay_path=None,
        port: Optional[int] = None,
        speed: Optional[float] = None,
        static_root: Optional[str] = None,
    ) -> None:
        self.config = config.with_generated_keys()
        self.controller = GameController(self.config, replay_path=replay_path)
        self.server = GameServer(
            self.controller,
            host=self.config.server.host,
            port=self.config.server.port if port is None else port,
            speed=self.config.server.speed if speed is None else speed,
            static_root=static_root,
        )
        self._thread: Optional[threading.Thread] = None

    @property
    def keys(self) -> dict:
        return self.config.keys

    @property
    def port(self) -> int:
        return self.server.bound_port

    @property
    def url(self) -> str:
        return f"ws://{self.config.server.host}:{self.port}{API_PATH}"

    def __enter__(self) -> "ServiceRunner":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.stop()

    def start(self) -> "ServiceRunner":
        def _target() -> None:
            try:
                asyncio.run(self.server.run())
            except BaseException:
                pass  # captured in startup_error; surfaced by wait_started

        self._thread = threading.Thread(target=_target, daemon=True)
        self._thread.start()
        self.server.wait_started()
        return self

    def stop(self) -> None:
        self.server.shutdown()
        if self._thread is not None:
            self._thread.join(timeout=10)
            self._thread = None
        self.controller.close()
