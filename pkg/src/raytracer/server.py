"""Real-time frame service.

One owner thread runs the loop (drain control mailbox, physics step, render,
broadcast); connection handlers only enqueue validated control messages and
pull encoded frames from bounded per-viewer sinks, so a slow viewer can never
stall rendering (sinks drop their oldest frame when full).

Wire format, binary frames::

    offset  size  field
    0       4     magic 0x52415946 ("RAYF"), big-endian
    4       4     frame id, strictly increasing per connection
    8       2     width
    10      2     height
    12      1     pixel format (1 = RGBA8)
    13      3     reserved
    16      ...   width * height * 4 RGBA bytes, row-major

Control messages are JSON text frames:
``{"type": "camera"|"params"|"resize"|"pause", ...}``; malformed input gets
``{"type": "error", "reason": ...}`` back and the connection stays open.
"""

from __future__ import annotations

import asyncio
import json
import math
import queue
import struct
import threading
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import __version__
from .camera import Camera
from .physics import FIXED_DT, PhysicsState, verlet_step
from .geometry import BodyKind
from .renderer import MAX_BOUNCE_LIMIT, render_frame
from .scene import Framebuffer, RenderParams, Scene

FRAME_MAGIC = 0x52415946  # "RAYF"
FORMAT_RGBA8 = 1
HEADER = struct.Struct(">IIHHB3x")

MAX_PIXELS = 3840 * 2160


# --- wire format ------------------------------------------------------------


def encode_frame(frame_id: int, fb: Framebuffer) -> bytes:
    header = HEADER.pack(FRAME_MAGIC, frame_id & 0xFFFFFFFF, fb.width, fb.height, FORMAT_RGBA8)
    p = fb.pixels
    rgba = np.empty((p.size, 4), dtype=np.uint8)
    rgba[:, 0] = (p >> 16) & 0xFF
    rgba[:, 1] = (p >> 8) & 0xFF
    rgba[:, 2] = p & 0xFF
    rgba[:, 3] = (p >> 24) & 0xFF
    return header + rgba.tobytes()


def decode_frame_header(data: bytes):
    """(frame_id, width, height, fmt) of an encoded frame; raises on bad magic."""
    if len(data) < HEADER.size:
        raise ValueError("frame shorter than header")
    magic, frame_id, width, height, fmt = HEADER.unpack_from(data)
    if magic != FRAME_MAGIC:
        raise ValueError(f"bad frame magic 0x{magic:08X}")
    return frame_id, width, height, fmt


# --- control messages -------------------------------------------------------


class ControlError(ValueError):
    """Rejected control message; the reason goes back to the sender."""


@dataclass
class CameraMsg:
    pos: tuple
    yaw: float
    pitch: float
    fov: float


@dataclass
class ParamsMsg:
    samples: int
    bounces: int


@dataclass
class ResizeMsg:
    width: int
    height: int


@dataclass
class PauseMsg:
    on: bool


ControlMessage = Union[CameraMsg, ParamsMsg, ResizeMsg, PauseMsg]


def _finite(doc, key):
    v = doc.get(key)
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
        raise ControlError(f"'{key}' must be a finite number")
    return float(v)


def _int(doc, key):
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ControlError(f"'{key}' must be an integer")
    return v


def parse_control(raw: str) -> ControlMessage:
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ControlError(f"invalid JSON: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ControlError("control message must be a JSON object")
    kind = doc.get("type")
    if kind == "camera":
        pos = doc.get("pos")
        if not (isinstance(pos, list) and len(pos) == 3):
            raise ControlError("'pos' must be a list of 3 numbers")
        if not all(isinstance(c, (int, float)) and not isinstance(c, bool) and math.isfinite(c) for c in pos):
            raise ControlError("'pos' must be a list of 3 finite numbers")
        fov = _finite(doc, "fov")
        if not 0.0 < fov < 180.0:
            raise ControlError("'fov' must be in (0, 180)")
        return CameraMsg(tuple(float(c) for c in pos), _finite(doc, "yaw"), _finite(doc, "pitch"), fov)
    if kind == "params":
        samples = _int(doc, "samples")
        bounces = _int(doc, "bounces")
        if samples < 1:
            raise ControlError("'samples' must be >= 1")
        if not 0 <= bounces <= MAX_BOUNCE_LIMIT:
            raise ControlError(f"'bounces' must be in [0, {MAX_BOUNCE_LIMIT}]")
        return ParamsMsg(samples, bounces)
    if kind == "resize":
        width = _int(doc, "width")
        height = _int(doc, "height")
        if width < 1 or height < 1:
            raise ControlError("frame dimensions must be positive")
        if width * height > MAX_PIXELS:
            raise ControlError(f"frame area capped at {MAX_PIXELS} pixels")
        return ResizeMsg(width, height)
    if kind == "pause":
        on = doc.get("on")
        if not isinstance(on, bool):
            raise ControlError("'on' must be a boolean")
        return PauseMsg(on)
    raise ControlError(f"unknown message type {kind!r}")


# --- frame loop -------------------------------------------------------------


class FrameSink:
    """Bounded frame queue for one viewer; drops the oldest frame when full."""

    def __init__(self, maxsize: int = 3):
        self._q: queue.Queue = queue.Queue(maxsize=maxsize)

    def offer(self, item: bytes):
        while True:
            try:
                self._q.put_nowait(item)
                return
            except queue.Full:
                try:
                    self._q.get_nowait()
                except queue.Empty:
                    pass

    def get(self, timeout: Optional[float] = None) -> Optional[bytes]:
        try:
            return self._q.get(timeout=timeout)
        except queue.Empty:
            return None


class FrameLoop:
    """Owns the scene and runs physics -> render -> broadcast at a target
    cadence; control messages apply between frames, last writer wins per
    message type."""

    def __init__(
        self,
        scene: Scene,
        camera: Camera,
        params: RenderParams,
        dynamic: Sequence[int] = (),
        target_fps: float = 60.0,
        workers: Optional[int] = None,
    ):
        self.scene = scene
        self.camera = camera
        self.params = params
        self.workers = workers
        self.fb = Framebuffer.create(params.width, params.height)
        self.physics = PhysicsState.for_bodies(scene.bodies, dynamic) if dynamic else None
        self.floor_height = min(
            (b.height for b in scene.bodies if b.kind == BodyKind.HORIZONTAL_PLANE),
            default=-1e30,
        )
        self.target_dt = 1.0 / target_fps
        self.frame_id = 0
        self.paused = False
        self.mailbox: queue.Queue = queue.Queue(maxsize=256)
        self._sinks: List[FrameSink] = []
        self._sinks_lock = threading.Lock()
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None

    def submit(self, msg: ControlMessage):
        while True:
            try:
                self.mailbox.put_nowait(msg)
                return
            except queue.Full:
                try:
                    self.mailbox.get_nowait()
                except queue.Empty:
                    pass

    def subscribe(self, maxsize: int = 3) -> FrameSink:
        sink = FrameSink(maxsize)
        with self._sinks_lock:
            self._sinks.append(sink)
        return sink

    def unsubscribe(self, sink: FrameSink):
        with self._sinks_lock:
            if sink in self._sinks:
                self._sinks.remove(sink)

    def _drain_mailbox(self):
        latest = {}
        while True:
            try:
                msg = self.mailbox.get_nowait()
            except queue.Empty:
                break
            latest[type(msg)] = msg
        for msg in latest.values():
            self._apply(msg)

    def _apply(self, msg: ControlMessage):
        if isinstance(msg, CameraMsg):
            self.camera = Camera(msg.pos, msg.yaw, msg.pitch, msg.fov)
        elif isinstance(msg, ParamsMsg):
            self.params = RenderParams(
                msg.samples, msg.bounces, self.params.width, self.params.height
            )
        elif isinstance(msg, ResizeMsg):
            self.params = RenderParams(
                self.params.shadow_samples, self.params.bounce_limit, msg.width, msg.height
            )
            self.fb = Framebuffer.create(msg.width, msg.height)
        elif isinstance(msg, PauseMsg):
            self.paused = msg.on

    def tick(self) -> Optional[bytes]:
        """One loop iteration: apply controls, step, render, broadcast."""
        self._drain_mailbox()
        if self.paused:
            return None
        if self.physics is not None:
            verlet_step(self.physics, self.scene.bodies, self.floor_height, FIXED_DT)
        render_frame(self.scene, self.camera, self.params, self.fb, workers=self.workers)
        self.frame_id += 1
        payload = encode_frame(self.frame_id, self.fb)
        with self._sinks_lock:
            for sink in self._sinks:
                sink.offer(payload)
        return payload

    def _run(self):
        while not self._stop.is_set():
            t0 = time.perf_counter()
            self.tick()
            remaining = self.target_dt - (time.perf_counter() - t0)
            if remaining > 0:
                self._stop.wait(remaining)

    def start(self):
        if self._thread is not None:
            raise RuntimeError("frame loop already started")
        self._stop.clear()
        self._thread = threading.Thread(target=self._run, name="frame-loop", daemon=True)
        self._thread.start()

    def stop(self):
        if self._thread is None:
            return
        self._stop.set()
        self._thread.join(timeout=10.0)
        self._thread = None


# --- HTTP/WebSocket service -------------------------------------------------


def create_app(loop: FrameLoop, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="raytracer frame server")

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "version": __version__}

    @app.websocket("/stream")
    async def stream(ws: WebSocket):
        await ws.accept()
        sink = loop.subscribe()

        async def pump_frames():
            while True:
                frame = await asyncio.to_thread(sink.get, 0.25)
                if frame is not None:
                    await ws.send_bytes(frame)

        sender = asyncio.create_task(pump_frames())
        try:
            while True:
                message = await ws.receive()
                if message.get("type") == "websocket.disconnect":
                    break
                raw = message.get("text")
                if raw is None:
                    await ws.send_text(
                        json.dumps({"type": "error", "reason": "control messages must be text"})
                    )
                    continue
                try:
                    loop.submit(parse_control(raw))
                except ControlError as e:
                    await ws.send_text(json.dumps({"type": "error", "reason": str(e)}))
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            try:
                await sender
            except (asyncio.CancelledError, Exception):
                pass
            loop.unsubscribe(sink)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="viewer")

    return app


def serve(loop: FrameLoop, port: int = 8090, host: str = "127.0.0.1", static_dir=None):
    """Run the frame loop and the HTTP/WebSocket service until interrupted."""
    import uvicorn

    app = create_app(loop, static_dir=static_dir)
    loop.start()
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    finally:
        loop.stop()
