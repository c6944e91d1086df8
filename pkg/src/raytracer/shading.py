"""Blinn-Phong local illumination, cast-shadow tests and soft-shadow sampling.

Soft shadows sample a disc on the spherical light facing the surface point
using the sunflower-seed arrangement (golden-angle spiral), which is fully
deterministic: identical inputs produce identical sample sets everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, List

import numpy as np
from numba import njit

from . import geometry, vecmath as vm
from .vecmath import Vec3

if TYPE_CHECKING:
    from .scene import Scene

DEFAULT_AMBIENT = 0.15

# Shadow rays start this far along the surface normal to avoid re-hitting the
# surface they leave from ("shadow acne").
SHADOW_EPS = 1e-3

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass
class Light:
    """Spherical emitter."""

    position: Vec3
    radius: float
    color: Vec3 = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("light radius must be positive")


@dataclass
class ShadeContext:
    surface_pos: Vec3
    normal: Vec3  # unit
    view_dir: Vec3  # unit, surface -> camera
    shadow_coeff: float  # in [0, 1]


@njit(cache=True)
def diffuse_factor(normal: Vec3, to_light: Vec3) -> float:
    """Lambert term: surfaces facing away from the light go dark."""
    d = vm.dot(normal, to_light)
    return d if d > 0.0 else 0.0


@njit(cache=True)
def specular_factor_blinn(normal: Vec3, to_light: Vec3, view_dir: Vec3, reflectivity: float) -> float:
    """Blinn highlight: dot of the normal with the light/view halfway vector,
    raised to the reflectivity exponent."""
    hx = to_light[0] + view_dir[0]
    hy = to_light[1] + view_dir[1]
    hz = to_light[2] + view_dir[2]
    m = math.sqrt(hx * hx + hy * hy + hz * hz)
    if m == 0.0:
        return 0.0
    d = (normal[0] * hx + normal[1] * hy + normal[2] * hz) / m
    if d < 0.0:
        d = 0.0
    return d**reflectivity


@njit(cache=True)
def disc_basis(axis: Vec3):
    """Deterministic orthonormal basis of the plane perpendicular to axis."""
    c = vm.cross(axis, (0.0, 1.0, 0.0))
    m = vm.magnitude(c)
    if m < 1e-9:
        u = (1.0, 0.0, 0.0)
    else:
        u = (c[0] / m, c[1] / m, c[2] / m)
    v = vm.cross(axis, u)
    return u, v


@njit(cache=True)
def disc_point(i: int, n: int, center: Vec3, radius: float, u: Vec3, v: Vec3) -> Vec3:
    """Sample i of n on the sunflower spiral over the light disc."""
    r = 2.0 * radius * math.sqrt(i / n)
    theta = i * GOLDEN_ANGLE
    a = r * math.cos(theta)
    b = r * math.sin(theta)
    return (
        center[0] + a * u[0] + b * v[0],
        center[1] + a * u[1] + b * v[1],
        center[2] + a * u[2] + b * v[2],
    )


def sample_light_disc(light: Light, surface_pos: Vec3, n: int) -> List[Vec3]:
    """Sample points on the light disc facing surface_pos.

    n = 1 degenerates to the light center (hard shadows).
    """
    if n < 1:
        raise ValueError("sample count must be >= 1")
    if n == 1:
        return [light.position]
    axis = vm.normalize(vm.sub(surface_pos, light.position))
    u, v = disc_basis(axis)
    return [disc_point(i, n, light.position, light.radius, u, v) for i in range(n)]


@njit(cache=True)
def _visible_sample_count(surface, origin, sample_pts, kinds, positions, sizes):
    unblocked = 0
    for i in range(sample_pts.shape[0]):
        s = (sample_pts[i, 0], sample_pts[i, 1], sample_pts[i, 2])
        direction = vm.normalize(vm.sub(s, origin))
        limit = vm.distance(surface, s)
        if not geometry.occluded_packed(origin, direction, limit, kinds, positions, sizes):
            unblocked += 1
    return unblocked


def shadow_coefficient(surface_pos: Vec3, normal: Vec3, scene: "Scene", samples: List[Vec3]) -> float:
    """Fraction of light samples visible from surface_pos, in [0, 1].

    A sample is blocked iff some body intersects the shadow ray closer than
    the sample point; the ray starts SHADOW_EPS along the normal.
    """
    if not samples:
        raise ValueError("need at least one light sample")
    origin = vm.add(surface_pos, vm.scale(normal, SHADOW_EPS))
    kinds, positions, sizes, _, _ = geometry.pack_bodies(scene.bodies)
    pts = np.asarray(samples, dtype=np.float64).reshape(len(samples), 3)
    unblocked = _visible_sample_count(surface_pos, origin, pts, kinds, positions, sizes)
    return unblocked / len(samples)


@njit(cache=True)
def shade_color(
    base_color: Vec3,
    normal: Vec3,
    view_dir: Vec3,
    shadow_coeff: float,
    to_light: Vec3,
    reflectivity: float,
    light_color: Vec3,
    ambient: float,
) -> Vec3:
    """Combine ambient, diffuse and specular terms into a clamped color.

    With shadow_coeff = 0 this reduces exactly to base_color * ambient.
    """
    d = diffuse_factor(normal, to_light)
    s = specular_factor_blinn(normal, to_light, view_dir, reflectivity)
    lum = ambient + shadow_coeff * d * (1.0 - ambient)
    if lum > 1.0:
        lum = 1.0
    spec = shadow_coeff * s
    r = base_color[0] * lum + light_color[0] * spec
    g = base_color[1] * lum + light_color[1] * spec
    b = base_color[2] * lum + light_color[2] * spec
    return (min(max(r, 0.0), 1.0), min(max(g, 0.0), 1.0), min(max(b, 0.0), 1.0))


def shade(base_color: Vec3, ctx: ShadeContext, light: Light, to_light: Vec3, reflectivity: float, ambient: float) -> Vec3:
    if not 0.0 <= ambient <= 1.0:
        raise ValueError("ambient strength must be in [0, 1]")
    return shade_color(
        base_color, ctx.normal, ctx.view_dir, ctx.shadow_coeff, to_light, reflectivity, light.color, ambient
    )
