"""Perspective camera: NDC pixel mapping, relative placement and view rays.

The viewport is a 2-unit square region centered on the origin in the xy
plane; the camera sits behind it on -z at a distance set by the field of
view. Pixel (x, y) maps so the shorter window axis spans [-1, 1] and the
longer axis extends proportionally; +v is up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from numba import njit

from . import vecmath as vm
from .geometry import Ray
from .vecmath import Vec3

PITCH_LIMIT = math.pi / 2 - 1e-3


@dataclass
class Camera:
    position: Vec3 = (0.0, 0.0, 0.0)
    yaw: float = 0.0
    pitch: float = 0.0
    fov: float = 60.0  # degrees, exclusive (0, 180)

    def __post_init__(self):
        if not 0.0 < self.fov < 180.0:
            raise ValueError(f"fov must be in (0, 180) degrees, got {self.fov}")
        self.pitch = min(max(self.pitch, -PITCH_LIMIT), PITCH_LIMIT)


@dataclass
class Viewport:
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("viewport dimensions must be >= 1")


@njit(cache=True)
def _norm_screen_coords(x: float, y: float, width: float, height: float):
    if width > height:
        u = (x - width / 2 + height / 2) / height * 2 - 1
        v = -(y / height * 2 - 1)
    else:
        u = x / width * 2 - 1
        v = -((y - height / 2 + width / 2) / width * 2 - 1)
    return u, v


def norm_screen_coords(x: int, y: int, width: int, height: int):
    """Map a window pixel to normalized device coordinates."""
    if not (0 <= x < width and 0 <= y < height):
        raise ValueError(f"pixel ({x}, {y}) outside {width}x{height} window")
    return _norm_screen_coords(float(x), float(y), float(width), float(height))


@njit(cache=True)
def camera_viewport_distance(fov_degrees: float) -> float:
    """Distance from the camera to the viewport: 1 / tan(fov / 2)."""
    return 1.0 / math.tan(math.radians(fov_degrees) / 2.0)


@njit(cache=True)
def primary_direction(
    x: float, y: float, width: float, height: float, yaw: float, pitch: float, vdist: float
) -> Vec3:
    """Unit view direction through pixel (x, y) for a camera at distance vdist."""
    u, v = _norm_screen_coords(x, y, width, height)
    d = vm.normalize((u, v, vdist))
    return vm.rotate_yaw_pitch(d, yaw, pitch)


def primary_ray(x: int, y: int, cam: Camera, vp: Viewport) -> Ray:
    """View ray from the camera through window pixel (x, y)."""
    if not (0 <= x < vp.width and 0 <= y < vp.height):
        raise ValueError(f"pixel ({x}, {y}) outside {vp.width}x{vp.height} window")
    direction = primary_direction(
        float(x),
        float(y),
        float(vp.width),
        float(vp.height),
        cam.yaw,
        cam.pitch,
        camera_viewport_distance(cam.fov),
    )
    return Ray(cam.position, direction)
