"""The per-pixel kernel: closest hit, shading, bounded reflections via a
manual stack, skybox fallback and data-parallel frame synthesis.

Reflections run in two passes. The forward pass walks the bounce chain,
pushing one record per hit (base color, reflectivity mix ratio and every
shading input, including the soft-shadow coefficient); it stops on a miss or
when the bounce limit is reached. The unwind then folds the records in
reverse, mixing each base color with the color from below and shading the
result. A chain cut off by the bounce limit shades its last base color
as-is, so a limit of 0 is plain Blinn-Phong shading; a miss seeds the
unwind with the skybox sample (black without a skybox), which is never
shaded itself.

Pixels are fully independent: the frame may be partitioned across any
number of workers and the output is byte-identical regardless.
"""

from __future__ import annotations

import math

import numpy as np
from numba import get_num_threads, njit, prange, set_num_threads

from . import camera as cam_mod, geometry, shading, vecmath as vm
from .camera import Camera, Viewport, camera_viewport_distance, primary_direction
from .geometry import MISS, Ray
from .scene import Framebuffer, RenderParams, Scene, Skybox, pack_bodies, pack_skybox
from .vecmath import Vec3

# Reflection rays start this far along the normal so they cannot re-hit the
# surface they bounce off.
REFLECT_EPS = 1e-3

# The bounce stack is a fixed-size allocation in the kernel.
MAX_BOUNCE_LIMIT = 31

_TWO_PI = 2.0 * math.pi

# Stack record layout: base rgb | refl ratio | normal xyz | view xyz |
# to-light xyz | shadow coeff | reflectivity exponent.
_REC_WIDTH = 15


@njit(cache=True)
def _pack_color(c: Vec3) -> np.uint32:
    r = int(c[0] * 255.0 + 0.5)
    g = int(c[1] * 255.0 + 0.5)
    b = int(c[2] * 255.0 + 0.5)
    return np.uint32(0xFF000000 | (r << 16) | (g << 8) | b)


def pack_color(c: Vec3) -> int:
    """Pack a [0,1] RGB triple into 0xAARRGGBB with alpha forced opaque."""
    if not all(0.0 <= ch <= 1.0 for ch in c):
        raise ValueError(f"channels must be in [0, 1], got {c}")
    return int(_pack_color(c))


@njit(cache=True)
def _skybox_sample(d: Vec3, texels, width: int, height: int) -> Vec3:
    u = 0.5 + math.atan2(d[0], d[2]) / _TWO_PI
    dy = min(max(d[1], -1.0), 1.0)
    v = 0.5 - math.asin(dy) / math.pi
    tx = int(math.floor(u * width)) % width
    ty = int(math.floor(v * height))
    if ty < 0:
        ty = 0
    elif ty > height - 1:
        ty = height - 1
    r = texels[ty, tx, 0]
    g = texels[ty, tx, 1]
    b = texels[ty, tx, 2]
    return (min(max(r, 0.0), 1.0), min(max(g, 0.0), 1.0), min(max(b, 0.0), 1.0))


def skybox_sample(direction: Vec3, sky: Skybox) -> Vec3:
    """Equirectangular nearest-texel lookup for a unit direction."""
    return _skybox_sample(direction, sky.texels, sky.width, sky.height)


@njit(cache=True)
def _shadow_coeff(surface, normal, light_pos, light_radius, n, kinds, positions, sizes):
    origin = (
        surface[0] + shading.SHADOW_EPS * normal[0],
        surface[1] + shading.SHADOW_EPS * normal[1],
        surface[2] + shading.SHADOW_EPS * normal[2],
    )
    if n > 1:
        axis = vm.normalize(vm.sub(surface, light_pos))
        bu, bv = shading.disc_basis(axis)
    else:
        bu = (1.0, 0.0, 0.0)
        bv = (0.0, 0.0, 1.0)
    unblocked = 0
    for i in range(n):
        if n == 1:
            s = light_pos
        else:
            s = shading.disc_point(i, n, light_pos, light_radius, bu, bv)
        direction = vm.normalize(vm.sub(s, origin))
        limit = vm.distance(surface, s)
        if not geometry.occluded_packed(origin, direction, limit, kinds, positions, sizes):
            unblocked += 1
    return unblocked / n


@njit(cache=True)
def _trace(
    origin,
    direction,
    kinds,
    positions,
    sizes,
    colors,
    refls,
    light_pos,
    light_radius,
    light_color,
    ambient,
    max_refl,
    sky,
    sky_w,
    sky_h,
    has_sky,
    shadow_samples,
    bounce_limit,
):
    # Loop structure bounds the stack at bounce_limit + 1 records.
    stack = np.empty((MAX_BOUNCE_LIMIT + 1, _REC_WIDTH))
    m = 0
    exhausted = False
    tail = (0.0, 0.0, 0.0)

    for k in range(bounce_limit + 1):
        idx, t = geometry.closest_hit_packed(origin, direction, kinds, positions, sizes)
        if idx < 0:
            if has_sky:
                tail = _skybox_sample(direction, sky, sky_w, sky_h)
            break
        hit = (
            origin[0] + direction[0] * t,
            origin[1] + direction[1] * t,
            origin[2] + direction[2] * t,
        )
        if kinds[idx] == 0:
            normal = geometry.sphere_normal(
                (positions[idx, 0], positions[idx, 1], positions[idx, 2]), hit
            )
        else:
            normal = (0.0, 1.0, 0.0)
        view = (-direction[0], -direction[1], -direction[2])
        to_light = vm.normalize(vm.sub(light_pos, hit))
        sc = _shadow_coeff(
            hit, normal, light_pos, light_radius, shadow_samples, kinds, positions, sizes
        )

        stack[m, 0] = colors[idx, 0]
        stack[m, 1] = colors[idx, 1]
        stack[m, 2] = colors[idx, 2]
        stack[m, 3] = refls[idx] / max_refl
        stack[m, 4] = normal[0]
        stack[m, 5] = normal[1]
        stack[m, 6] = normal[2]
        stack[m, 7] = view[0]
        stack[m, 8] = view[1]
        stack[m, 9] = view[2]
        stack[m, 10] = to_light[0]
        stack[m, 11] = to_light[1]
        stack[m, 12] = to_light[2]
        stack[m, 13] = sc
        stack[m, 14] = refls[idx]
        m += 1

        if k == bounce_limit:
            exhausted = True
            break
        origin = (
            hit[0] + REFLECT_EPS * normal[0],
            hit[1] + REFLECT_EPS * normal[1],
            hit[2] + REFLECT_EPS * normal[2],
        )
        direction = vm.reflect(direction, normal)

    if m == 0:
        return tail

    if exhausted:
        # Depth cut the chain: the last record shades its own base color,
        # the reflection slot contributes nothing.
        k = m - 1
        col = shading.shade_color(
            (stack[k, 0], stack[k, 1], stack[k, 2]),
            (stack[k, 4], stack[k, 5], stack[k, 6]),
            (stack[k, 7], stack[k, 8], stack[k, 9]),
            stack[k, 13],
            (stack[k, 10], stack[k, 11], stack[k, 12]),
            stack[k, 14],
            light_color,
            ambient,
        )
        start = m - 2
    else:
        col = tail
        start = m - 1

    for k in range(start, -1, -1):
        rr = stack[k, 3]
        mixed = (
            stack[k, 0] * (1.0 - rr) + col[0] * rr,
            stack[k, 1] * (1.0 - rr) + col[1] * rr,
            stack[k, 2] * (1.0 - rr) + col[2] * rr,
        )
        col = shading.shade_color(
            mixed,
            (stack[k, 4], stack[k, 5], stack[k, 6]),
            (stack[k, 7], stack[k, 8], stack[k, 9]),
            stack[k, 13],
            (stack[k, 10], stack[k, 11], stack[k, 12]),
            stack[k, 14],
            light_color,
            ambient,
        )
    return col


@njit(parallel=True, nogil=True, cache=True)
def _render_kernel(
    pixels,
    width,
    height,
    cam_pos,
    yaw,
    pitch,
    vdist,
    kinds,
    positions,
    sizes,
    colors,
    refls,
    light_pos,
    light_radius,
    light_color,
    ambient,
    max_refl,
    sky,
    sky_w,
    sky_h,
    has_sky,
    shadow_samples,
    bounce_limit,
):
    for idx in prange(width * height):
        x = idx % width
        y = idx // width
        direction = primary_direction(
            float(x), float(y), float(width), float(height), yaw, pitch, vdist
        )
        col = _trace(
            cam_pos,
            direction,
            kinds,
            positions,
            sizes,
            colors,
            refls,
            light_pos,
            light_radius,
            light_color,
            ambient,
            max_refl,
            sky,
            sky_w,
            sky_h,
            has_sky,
            shadow_samples,
            bounce_limit,
        )
        pixels[idx] = _pack_color(col)


def _scene_args(scene: Scene):
    kinds, positions, sizes, colors, refls = pack_bodies(scene.bodies)
    sky, sky_w, sky_h, has_sky = pack_skybox(scene.skybox)
    return (
        kinds,
        positions,
        sizes,
        colors,
        refls,
        scene.light.position,
        scene.light.radius,
        scene.light.color,
        scene.ambient,
        scene.max_reflectivity,
        sky,
        sky_w,
        sky_h,
        has_sky,
    )


def ray_trace_iterative(ray: Ray, scene: Scene, params: RenderParams) -> Vec3:
    """Color gathered by one ray under the scene's light and bounce budget."""
    if params.bounce_limit > MAX_BOUNCE_LIMIT:
        raise ValueError(f"bounce limit capped at {MAX_BOUNCE_LIMIT}")
    return _trace(
        ray.origin,
        ray.direction,
        *_scene_args(scene),
        params.shadow_samples,
        params.bounce_limit,
    )


def render_frame(scene: Scene, cam: Camera, params: RenderParams, out: Framebuffer, workers=None):
    """Render one frame into out; pixel (x, y) lands at index x + y * width.

    workers picks the number of kernel threads for this call; the result does
    not depend on it.
    """
    if (out.width, out.height) != (params.width, params.height):
        raise ValueError(
            f"framebuffer {out.width}x{out.height} does not match "
            f"params {params.width}x{params.height}"
        )
    if params.bounce_limit > MAX_BOUNCE_LIMIT:
        raise ValueError(f"bounce limit capped at {MAX_BOUNCE_LIMIT}")
    args = (
        out.pixels,
        params.width,
        params.height,
        cam.position,
        cam.yaw,
        cam.pitch,
        camera_viewport_distance(cam.fov),
        *_scene_args(scene),
        params.shadow_samples,
        params.bounce_limit,
    )
    if workers is None:
        _render_kernel(*args)
        return
    prev = get_num_threads()
    set_num_threads(workers)
    try:
        _render_kernel(*args)
    finally:
        set_num_threads(prev)
