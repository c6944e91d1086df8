"""3-component vector algebra and yaw/pitch rotations.

Vectors are plain ``(x, y, z)`` float tuples so the same jitted functions can
be called from Python and from inside the render kernel. Color triples use
the same representation with linear RGB components in [0, 1].
"""

from __future__ import annotations

import math
from typing import NamedTuple, Tuple

from numba import njit

Vec3 = Tuple[float, float, float]

ZERO: Vec3 = (0.0, 0.0, 0.0)


class Angles(NamedTuple):
    """Yaw/pitch pair in radians. Stored unclamped; the camera clamps pitch."""

    yaw: float
    pitch: float


@njit(cache=True)
def add(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


@njit(cache=True)
def sub(a: Vec3, b: Vec3) -> Vec3:
    """Componentwise a - b; sub(B, A) is the vector pointing from A to B."""
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


@njit(cache=True)
def scale(a: Vec3, s: float) -> Vec3:
    return (a[0] * s, a[1] * s, a[2] * s)


@njit(cache=True)
def mul(a: Vec3, b: Vec3) -> Vec3:
    """Componentwise product, used for color modulation."""
    return (a[0] * b[0], a[1] * b[1], a[2] * b[2])


@njit(cache=True)
def dot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


@njit(cache=True)
def cross(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


@njit(cache=True)
def magnitude(a: Vec3) -> float:
    return math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])


@njit(cache=True)
def normalize(a: Vec3) -> Vec3:
    """Unit vector in the direction of a.

    Returns (0, 0, 0) for a zero vector; boundaries that require unit vectors
    check for that themselves so the per-pixel path stays branch-light.
    """
    m = magnitude(a)
    if m == 0.0:
        return (0.0, 0.0, 0.0)
    return (a[0] / m, a[1] / m, a[2] / m)


@njit(cache=True)
def distance(a: Vec3, b: Vec3) -> float:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    dz = a[2] - b[2]
    return math.sqrt(dx * dx + dy * dy + dz * dz)


@njit(cache=True)
def reflect(i: Vec3, n: Vec3) -> Vec3:
    """Mirror the unit incident direction i off a surface with unit normal n.

    r = i - 2 (n . i) n, so dot(r, n) == -dot(i, n).
    """
    k = 2.0 * (n[0] * i[0] + n[1] * i[1] + n[2] * i[2])
    return (i[0] - k * n[0], i[1] - k * n[1], i[2] - k * n[2])


@njit(cache=True)
def rotate_yaw_pitch(d: Vec3, yaw: float, pitch: float) -> Vec3:
    """Rotate d by pitch (about x) then yaw (about y), preserving magnitude."""
    cb = math.cos(pitch)
    sb = math.sin(pitch)
    y2 = d[1] * cb - d[2] * sb
    z2 = d[1] * sb + d[2] * cb
    ca = math.cos(yaw)
    sa = math.sin(yaw)
    x2 = d[0] * ca + z2 * sa
    z3 = -d[0] * sa + z2 * ca
    return (x2, y2, z3)
