"""Independent high-precision references the tests check the package against.

Everything here is written from the math directly: quadratic-formula sphere
intersection, explicit recursion for bounded reflections, numpy float64
vectors. It reads scene data through the package's dataclasses but shares no
computation code with the render path.
"""

import math

import numpy as np

from raytracer.geometry import BodyKind

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
SHADOW_EPS = 1e-3
REFLECT_EPS = 1e-3


def v3(x):
    return np.asarray(x, dtype=np.float64)


def normalized(a):
    n = math.sqrt(float(a @ a))
    return a / n


def sphere_hit(origin, direction, center, radius):
    """Nearest crossing via the quadratic formula, or None.

    Same acceptance rules as the engine: spheres behind the origin and rays
    starting inside do not count; tangency within 1e-7 of the discriminant
    still hits.
    """
    oc = v3(origin) - v3(center)
    hb = float(oc @ v3(direction))
    c = float(oc @ oc) - radius * radius
    disc4 = hb * hb - c
    if disc4 < -1e-7:
        return None
    t = -hb - math.sqrt(max(disc4, 0.0))
    if t < 0.0:
        return None
    return t


def plane_hit(origin, direction, height):
    dy = float(direction[1])
    if dy == 0.0:
        return None
    t = (height - float(origin[1])) / dy
    return t if t > 0.0 else None


def body_hit(origin, direction, body):
    if body.kind == BodyKind.SPHERE:
        return sphere_hit(origin, direction, body.position, body.size)
    return plane_hit(origin, direction, body.height)


def closest_hit(origin, direction, bodies):
    """(index, distance) of the nearest hit, or None. Lowest index wins ties."""
    best = None
    for i, body in enumerate(bodies):
        t = body_hit(origin, direction, body)
        if t is not None and (best is None or t < best[1]):
            best = (i, t)
    return best


def disc_samples(light, surface, n):
    if n == 1:
        return [v3(light.position)]
    center = v3(light.position)
    axis = normalized(v3(surface) - center)
    c = np.cross(axis, v3((0.0, 1.0, 0.0)))
    m = math.sqrt(float(c @ c))
    u = v3((1.0, 0.0, 0.0)) if m < 1e-9 else c / m
    w = np.cross(axis, u)
    pts = []
    for i in range(n):
        r = 2.0 * light.radius * math.sqrt(i / n)
        theta = i * GOLDEN_ANGLE
        pts.append(center + u * (r * math.cos(theta)) + w * (r * math.sin(theta)))
    return pts


def shadow_coeff(surface, normal, scene, n):
    surface = v3(surface)
    origin = surface + SHADOW_EPS * v3(normal)
    unblocked = 0
    for s in disc_samples(scene.light, surface, n):
        d = normalized(s - origin)
        limit = math.sqrt(float((s - surface) @ (s - surface)))
        blocked = False
        for body in scene.bodies:
            t = body_hit(origin, d, body)
            if t is not None and t < limit:
                blocked = True
                break
        if not blocked:
            unblocked += 1
    return unblocked / n


def shade(base, normal, view, shadow, to_light, reflectivity, light_color, ambient):
    diff = max(float(v3(normal) @ v3(to_light)), 0.0)
    h = v3(to_light) + v3(view)
    hm = math.sqrt(float(h @ h))
    if hm == 0.0:
        spec = 0.0
    else:
        spec = max(float(v3(normal) @ (h / hm)), 0.0) ** reflectivity
    lum = min(ambient + shadow * diff * (1.0 - ambient), 1.0)
    col = v3(base) * lum + v3(light_color) * (shadow * spec)
    return np.clip(col, 0.0, 1.0)


def sky_sample(direction, skybox):
    u = 0.5 + math.atan2(float(direction[0]), float(direction[2])) / (2.0 * math.pi)
    w = 0.5 - math.asin(min(max(float(direction[1]), -1.0), 1.0)) / math.pi
    tx = int(math.floor(u * skybox.width)) % skybox.width
    ty = min(max(int(math.floor(w * skybox.height)), 0), skybox.height - 1)
    return np.clip(v3(skybox.texels[ty, tx]), 0.0, 1.0)


def ray_trace_recursive(origin, direction, scene, shadow_samples, depth):
    """Direct transcription of the bounded recursive reflection scheme."""
    origin = v3(origin)
    direction = v3(direction)
    hit = closest_hit(origin, direction, scene.bodies)
    if hit is None:
        if scene.skybox is None:
            return np.zeros(3)
        return sky_sample(direction, scene.skybox)
    i, t = hit
    body = scene.bodies[i]
    point = origin + direction * t
    if body.kind == BodyKind.SPHERE:
        normal = normalized(point - v3(body.position))
    else:
        normal = v3((0.0, 1.0, 0.0))
    view = -direction
    to_light = normalized(v3(scene.light.position) - point)
    shadow = shadow_coeff(point, normal, scene, shadow_samples)

    def shade_here(color):
        return shade(
            color, normal, view, shadow, to_light, body.reflectivity,
            scene.light.color, scene.ambient,
        )

    if depth == 0:
        return shade_here(v3(body.color))
    refl_dir = direction - 2.0 * float(normal @ direction) * normal
    refl_origin = point + REFLECT_EPS * normal
    refl_color = ray_trace_recursive(refl_origin, refl_dir, scene, shadow_samples, depth - 1)
    ratio = body.reflectivity / scene.max_reflectivity
    mixed = v3(body.color) * (1.0 - ratio) + refl_color * ratio
    return shade_here(mixed)


def random_unit(rng):
    while True:
        d = rng.normal(size=3)
        n = math.sqrt(float(d @ d))
        if n > 1e-6:
            return d / n
