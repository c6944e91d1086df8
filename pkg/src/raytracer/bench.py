"""Frame-rate benchmark harness.

Renders a warm-up batch first (JIT compilation, caches), then times each
measured frame with a monotonic clock wrapped tightly around the render call
so display and bookkeeping stay out of the numbers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

from .camera import Camera
from .renderer import render_frame
from .scene import Framebuffer, RenderParams, Scene

RESOLUTIONS = {
    "720p": (1280, 720),
    "1080p": (1920, 1080),
    "4k": (3840, 2160),
}

DEFAULT_WARMUP_FRAMES = 100
DEFAULT_MEASURED_FRAMES = 10


@dataclass
class BenchReport:
    resolution: str
    shadow_samples: int
    bounce_limit: int
    warmup_frames: int
    measured_frames: int
    avg_frame_ms: float
    fps: float

    def summary(self) -> str:
        return (
            f"{self.resolution} samples={self.shadow_samples} "
            f"bounces={self.bounce_limit}: {self.avg_frame_ms:.2f} ms/frame "
            f"({self.fps:.1f} FPS, {self.warmup_frames} warmup + "
            f"{self.measured_frames} measured)"
        )


def run_benchmark(
    scene: Scene,
    cam: Camera,
    params: RenderParams,
    warmup_frames: int = DEFAULT_WARMUP_FRAMES,
    measured_frames: int = DEFAULT_MEASURED_FRAMES,
    workers: Optional[int] = None,
    render_fn: Optional[Callable[[], None]] = None,
) -> BenchReport:
    """Render warmup_frames untimed frames, then average measured_frames.

    render_fn replaces the whole render call when given (used to instrument
    the harness itself).
    """
    if warmup_frames < 0:
        raise ValueError("warmup frame count must be >= 0")
    if measured_frames < 1:
        raise ValueError("measured frame count must be >= 1")
    if render_fn is None:
        fb = Framebuffer.create(params.width, params.height)

        def render_fn():
            render_frame(scene, cam, params, fb, workers=workers)

    for _ in range(warmup_frames):
        render_fn()

    elapsed = 0.0
    for _ in range(measured_frames):
        t0 = time.perf_counter()
        render_fn()
        elapsed += time.perf_counter() - t0

    avg_ms = elapsed / measured_frames * 1000.0
    return BenchReport(
        resolution=f"{params.width}x{params.height}",
        shadow_samples=params.shadow_samples,
        bounce_limit=params.bounce_limit,
        warmup_frames=warmup_frames,
        measured_frames=measured_frames,
        avg_frame_ms=avg_ms,
        fps=1000.0 / avg_ms,
    )
