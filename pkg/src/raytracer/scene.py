"""World description and per-frame containers.

The render kernel consumes scenes in a structure-of-arrays form (one array
per body attribute); ``pack_bodies`` (re-exported from geometry) and
``pack_skybox`` produce it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .geometry import Body, pack_bodies
from .shading import DEFAULT_AMBIENT, Light

DEFAULT_MAX_REFLECTIVITY = 128.0


@dataclass
class Skybox:
    """Equirectangular panorama; texels may exceed 1.0 (HDR), sampling clamps."""

    width: int
    height: int
    texels: np.ndarray  # (height, width, 3) float32, row-major

    def __post_init__(self):
        if self.texels.shape != (self.height, self.width, 3):
            raise ValueError(
                f"texel array shape {self.texels.shape} does not match "
                f"{self.height}x{self.width}x3"
            )
        self.texels = np.ascontiguousarray(self.texels, dtype=np.float32)


@dataclass
class Scene:
    bodies: List[Body]
    light: Light
    skybox: Optional[Skybox] = None
    ambient: float = DEFAULT_AMBIENT
    max_reflectivity: float = DEFAULT_MAX_REFLECTIVITY

    def __post_init__(self):
        if not 0.0 <= self.ambient <= 1.0:
            raise ValueError("ambient strength must be in [0, 1]")
        if self.max_reflectivity <= 0:
            raise ValueError("max reflectivity must be positive")
        for i, body in enumerate(self.bodies):
            if body.reflectivity > self.max_reflectivity:
                raise ValueError(
                    f"body {i} reflectivity {body.reflectivity} exceeds "
                    f"max {self.max_reflectivity}"
                )


@dataclass
class RenderParams:
    shadow_samples: int
    bounce_limit: int
    width: int
    height: int

    def __post_init__(self):
        if self.shadow_samples < 1:
            raise ValueError("shadow sample count must be >= 1")
        if self.bounce_limit < 0:
            raise ValueError("bounce limit must be >= 0")
        if self.width < 1 or self.height < 1:
            raise ValueError("frame dimensions must be positive")


@dataclass
class Framebuffer:
    """Packed 0xAARRGGBB pixels, row-major, index x + y * width."""

    width: int
    height: int
    pixels: np.ndarray  # (width * height,) uint32

    @classmethod
    def create(cls, width: int, height: int) -> "Framebuffer":
        return cls(width, height, np.zeros(width * height, dtype=np.uint32))

    def __post_init__(self):
        if self.pixels.shape != (self.width * self.height,):
            raise ValueError("pixel buffer length must equal width * height")
        if self.pixels.dtype != np.uint32:
            raise ValueError("pixel buffer must be uint32")

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()


_EMPTY_SKY = np.zeros((1, 1, 3), dtype=np.float32)


def pack_skybox(skybox: Optional[Skybox]):
    """(texels, width, height, present) with a 1x1 placeholder when absent."""
    if skybox is None:
        return _EMPTY_SKY, 1, 1, False
    return skybox.texels, skybox.width, skybox.height, True
