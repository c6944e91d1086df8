"""Rays, primitive intersection tests, surface normals and closest-hit search.

Intersection cores are jitted and shared with the render kernel; a miss is
signalled by ``MISS`` (+inf) so closest-hit reduces to a running minimum.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from numba import njit

from . import vecmath as vm
from .vecmath import Vec3

MISS = math.inf

# Tangent rays whose squared center offset exceeds r^2 by at most this still
# count as grazing hits with a zero chord half-length.
GRAZE_EPS = 1e-7


class BodyKind(enum.IntEnum):
    SPHERE = 0
    HORIZONTAL_PLANE = 1


@dataclass
class Body:
    """A scene primitive: a sphere, or a horizontal plane at height position.y."""

    kind: BodyKind
    position: Vec3
    size: float
    color: Vec3
    reflectivity: float = 0.0

    def __post_init__(self):
        if self.kind == BodyKind.SPHERE and self.size <= 0:
            raise ValueError(f"sphere radius must be positive, got {self.size}")
        if not all(0.0 <= c <= 1.0 for c in self.color):
            raise ValueError(f"color components must be in [0, 1], got {self.color}")
        if self.reflectivity < 0:
            raise ValueError("reflectivity must be non-negative")

    @classmethod
    def sphere(cls, position, radius, color, reflectivity=0.0) -> "Body":
        return cls(BodyKind.SPHERE, position, radius, color, reflectivity)

    @classmethod
    def plane(cls, height, color, reflectivity=0.0) -> "Body":
        return cls(BodyKind.HORIZONTAL_PLANE, (0.0, height, 0.0), 1.0, color, reflectivity)

    @property
    def height(self) -> float:
        return self.position[1]


@dataclass
class Ray:
    origin: Vec3
    direction: Vec3  # unit

    def __post_init__(self):
        if abs(vm.magnitude(self.direction) - 1.0) > 1e-5:
            raise ValueError(f"ray direction must be unit length, got {self.direction}")

    def at(self, t: float) -> Vec3:
        return vm.add(self.origin, vm.scale(self.direction, t))


@dataclass
class HitRecord:
    body_index: int
    point: Vec3
    distance: float


@njit(cache=True)
def ray_sphere_intersect(origin: Vec3, direction: Vec3, center: Vec3, radius: float) -> float:
    """Distance to the nearest boundary crossing, or MISS.

    Geometric solution: project center - origin onto the direction; spheres
    behind the origin and rays starting inside the sphere do not count.
    """
    lx = center[0] - origin[0]
    ly = center[1] - origin[1]
    lz = center[2] - origin[2]
    tca = lx * direction[0] + ly * direction[1] + lz * direction[2]
    if tca < 0.0:
        return MISS
    d2 = lx * lx + ly * ly + lz * lz - tca * tca
    rad = radius * radius - d2
    if rad < -GRAZE_EPS:
        return MISS
    if rad < 0.0:
        rad = 0.0
    t = tca - math.sqrt(rad)
    if t < 0.0:
        return MISS
    return t


@njit(cache=True)
def ray_plane_intersect(origin: Vec3, direction: Vec3, height: float) -> float:
    """Distance to the horizontal plane y = height, or MISS."""
    dy = direction[1]
    if dy == 0.0:
        return MISS
    t = (height - origin[1]) / dy
    if t <= 0.0:
        return MISS
    return t


@njit(cache=True)
def sphere_normal(center: Vec3, point: Vec3) -> Vec3:
    return vm.normalize(vm.sub(point, center))


@njit(cache=True)
def plane_normal() -> Vec3:
    return (0.0, 1.0, 0.0)


def intersect_body(ray: Ray, body: Body) -> float:
    """Hit distance for one body, or MISS."""
    if body.kind == BodyKind.SPHERE:
        return ray_sphere_intersect(ray.origin, ray.direction, body.position, body.size)
    return ray_plane_intersect(ray.origin, ray.direction, body.height)


def closest_hit(ray: Ray, scene) -> Optional[HitRecord]:
    """Nearest hit over all scene bodies; ties go to the lowest body index."""
    best_t = MISS
    best_i = -1
    for i, body in enumerate(scene.bodies):
        t = intersect_body(ray, body)
        if t < best_t:
            best_t = t
            best_i = i
    if best_i < 0:
        return None
    return HitRecord(best_i, ray.at(best_t), best_t)


def surface_normal(body: Body, point: Vec3) -> Vec3:
    if body.kind == BodyKind.SPHERE:
        if point == body.position:
            raise ValueError("degenerate hit: point coincides with sphere center")
        return sphere_normal(body.position, point)
    return plane_normal()


# --- packed structure-of-arrays form used by the jitted hot paths -----------


def pack_bodies(bodies: List[Body]):
    """Split bodies into (kinds, positions, sizes, colors, reflectivities)."""
    n = len(bodies)
    kinds = np.empty(n, dtype=np.int32)
    positions = np.empty((n, 3), dtype=np.float64)
    sizes = np.empty(n, dtype=np.float64)
    colors = np.empty((n, 3), dtype=np.float64)
    refl = np.empty(n, dtype=np.float64)
    for i, b in enumerate(bodies):
        kinds[i] = int(b.kind)
        positions[i] = b.position
        sizes[i] = b.size
        colors[i] = b.color
        refl[i] = b.reflectivity
    return kinds, positions, sizes, colors, refl


@njit(cache=True)
def intersect_packed(origin, direction, kinds, positions, sizes, index):
    if kinds[index] == 0:
        return ray_sphere_intersect(
            origin,
            direction,
            (positions[index, 0], positions[index, 1], positions[index, 2]),
            sizes[index],
        )
    return ray_plane_intersect(origin, direction, positions[index, 1])


@njit(cache=True)
def closest_hit_packed(origin, direction, kinds, positions, sizes):
    """(index, distance) of the nearest hit, or (-1, MISS)."""
    best_t = MISS
    best_i = -1
    for i in range(kinds.shape[0]):
        t = intersect_packed(origin, direction, kinds, positions, sizes, i)
        if t < best_t:
            best_t = t
            best_i = i
    return best_i, best_t


@njit(cache=True)
def occluded_packed(origin, direction, limit, kinds, positions, sizes):
    """True when any body intersects strictly before limit."""
    for i in range(kinds.shape[0]):
        if intersect_packed(origin, direction, kinds, positions, sizes, i) < limit:
            return True
    return False
