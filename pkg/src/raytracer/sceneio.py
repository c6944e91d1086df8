"""Scene files, image IO and the hard-coded benchmark scene.

Scenes are JSON documents::

    {
      "ambient": 0.15,
      "maxReflectivity": 128.0,
      "light": {"position": [x, y, z], "radius": r, "color": [r, g, b]},
      "plane": {"height": h, "color": [...], "reflectivity": k},   # optional
      "spheres": [
        {"position": [...], "radius": r, "color": [...],
         "reflectivity": k, "dynamic": false},
        ...
      ],
      "skybox": "sky.hdr"                                          # optional
    }

Parsed scenes list the spheres first (file order) and the plane last, which
fixes body indices for tie-breaking and physics bindings. Frame output is
binary PPM (P6); skyboxes load from binary PPM or Radiance HDR.
"""

from __future__ import annotations

import json
import math
import os
from typing import List, Optional, Tuple

import numpy as np

from .camera import Camera
from .geometry import Body, BodyKind
from .scene import Framebuffer, Scene, Skybox
from .shading import Light


class SceneFormatError(ValueError):
    """Malformed scene document or image file."""


def _vec(doc, key, where):
    v = doc.get(key)
    if not (isinstance(v, (list, tuple)) and len(v) == 3 and all(isinstance(c, (int, float)) for c in v)):
        raise SceneFormatError(f"{where}.{key} must be a list of 3 numbers")
    return (float(v[0]), float(v[1]), float(v[2]))


def _num(doc, key, where, default=None):
    v = doc.get(key, default)
    if not isinstance(v, (int, float)):
        raise SceneFormatError(f"{where}.{key} must be a number")
    return float(v)


def parse_scene(doc: dict, base_dir: str = ".") -> Tuple[Scene, List[int]]:
    """Build a Scene from a parsed document; also returns the indices of
    spheres flagged dynamic (physics-driven)."""
    if not isinstance(doc, dict):
        raise SceneFormatError("scene document must be a JSON object")
    light_doc = doc.get("light")
    if not isinstance(light_doc, dict):
        raise SceneFormatError("scene.light is required")
    light = Light(
        position=_vec(light_doc, "position", "light"),
        radius=_num(light_doc, "radius", "light"),
        color=_vec(light_doc, "color", "light") if "color" in light_doc else (1.0, 1.0, 1.0),
    )

    bodies: List[Body] = []
    dynamic: List[int] = []
    for i, s in enumerate(doc.get("spheres", [])):
        if not isinstance(s, dict):
            raise SceneFormatError(f"spheres[{i}] must be an object")
        where = f"spheres[{i}]"
        bodies.append(
            Body.sphere(
                _vec(s, "position", where),
                _num(s, "radius", where),
                _vec(s, "color", where),
                _num(s, "reflectivity", where, default=0.0),
            )
        )
        if s.get("dynamic", False):
            dynamic.append(i)

    plane_doc = doc.get("plane")
    if plane_doc is not None:
        if not isinstance(plane_doc, dict):
            raise SceneFormatError("scene.plane must be an object")
        bodies.append(
            Body.plane(
                _num(plane_doc, "height", "plane"),
                _vec(plane_doc, "color", "plane"),
                _num(plane_doc, "reflectivity", "plane", default=0.0),
            )
        )

    skybox = None
    sky_path = doc.get("skybox")
    if sky_path is not None:
        if not isinstance(sky_path, str):
            raise SceneFormatError("scene.skybox must be a file path string")
        skybox = load_skybox(os.path.join(base_dir, sky_path))

    try:
        scene = Scene(
            bodies=bodies,
            light=light,
            skybox=skybox,
            ambient=_num(doc, "ambient", "scene", default=0.15),
            max_reflectivity=_num(doc, "maxReflectivity", "scene", default=128.0),
        )
    except ValueError as e:
        raise SceneFormatError(str(e)) from e
    return scene, dynamic


def serialize_scene(scene: Scene, dynamic: Optional[List[int]] = None) -> dict:
    """Inverse of parse_scene, minus any skybox (image data is external)."""
    dynamic = set(dynamic or [])
    doc = {
        "ambient": scene.ambient,
        "maxReflectivity": scene.max_reflectivity,
        "light": {
            "position": list(scene.light.position),
            "radius": scene.light.radius,
            "color": list(scene.light.color),
        },
        "spheres": [],
    }
    for i, body in enumerate(scene.bodies):
        if body.kind == BodyKind.SPHERE:
            doc["spheres"].append(
                {
                    "position": list(body.position),
                    "radius": body.size,
                    "color": list(body.color),
                    "reflectivity": body.reflectivity,
                    "dynamic": i in dynamic,
                }
            )
        else:
            doc["plane"] = {
                "height": body.height,
                "color": list(body.color),
                "reflectivity": body.reflectivity,
            }
    return doc


def load_scene(path: str) -> Tuple[Scene, List[int]]:
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise SceneFormatError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    return parse_scene(doc, base_dir=os.path.dirname(path) or ".")


def save_scene(scene: Scene, path: str, dynamic: Optional[List[int]] = None):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(serialize_scene(scene, dynamic), f, indent=2)
        f.write("\n")


# --- frame output ---------------------------------------------------------


def write_ppm(fb: Framebuffer, sink):
    """Binary PPM: header then RGB bytes row-major, alpha dropped. Bit-exact
    for identical framebuffers."""
    sink.write(b"P6\n%d %d\n255\n" % (fb.width, fb.height))
    p = fb.pixels
    rgb = np.empty((p.size, 3), dtype=np.uint8)
    rgb[:, 0] = (p >> 16) & 0xFF
    rgb[:, 1] = (p >> 8) & 0xFF
    rgb[:, 2] = p & 0xFF
    sink.write(rgb.tobytes())


# --- skybox input ---------------------------------------------------------


def load_skybox(path: str) -> Skybox:
    """Load an equirectangular panorama from binary PPM or Radiance HDR."""
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise SceneFormatError(f"{path}: cannot read skybox: {e}") from e
    if data[:2] == b"P6":
        return _decode_ppm(path, data)
    if data[:2] == b"#?":
        return _decode_radiance_hdr(path, data)
    raise SceneFormatError(f"{path}: byte 0: not a P6 PPM or Radiance HDR file")


def _decode_ppm(path: str, data: bytes) -> Skybox:
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise SceneFormatError(f"{path}: byte {pos}: truncated PPM header")
        try:
            fields.append(int(data[start:pos]))
        except ValueError:
            raise SceneFormatError(f"{path}: byte {start}: bad PPM header token") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise SceneFormatError(f"{path}: bad PPM dimensions {width}x{height}")
    if maxval != 255:
        raise SceneFormatError(f"{path}: only maxval 255 PPM is supported, got {maxval}")
    pos += 1  # single whitespace after maxval
    need = width * height * 3
    if len(data) - pos < need:
        raise SceneFormatError(
            f"{path}: byte {len(data)}: truncated pixel data, need {need} bytes from {pos}"
        )
    raw = np.frombuffer(data, dtype=np.uint8, count=need, offset=pos)
    texels = (raw.reshape(height, width, 3).astype(np.float32)) / 255.0
    return Skybox(width, height, texels)


def _decode_radiance_hdr(path: str, data: bytes) -> Skybox:
    pos = 0

    def read_line():
        nonlocal pos
        end = data.find(b"\n", pos)
        if end < 0:
            raise SceneFormatError(f"{path}: byte {pos}: truncated HDR header")
        line = data[pos:end]
        pos = end + 1
        return line

    magic = read_line()
    if not magic.startswith(b"#?"):
        raise SceneFormatError(f"{path}: byte 0: missing HDR magic")
    fmt_ok = True
    while True:
        line = read_line()
        if line == b"":
            break
        if line.startswith(b"FORMAT="):
            fmt_ok = line == b"FORMAT=32-bit_rle_rgbe"
    if not fmt_ok:
        raise SceneFormatError(f"{path}: unsupported HDR pixel format")
    res = read_line().split()
    if len(res) != 4 or res[0] != b"-Y" or res[2] != b"+X":
        raise SceneFormatError(f"{path}: byte {pos}: unsupported HDR resolution line")
    height, width = int(res[1]), int(res[3])

    rgbe = np.empty((height, width, 4), dtype=np.uint8)
    for y in range(height):
        if len(data) - pos < 4:
            raise SceneFormatError(f"{path}: byte {pos}: truncated HDR scanline {y}")
        b0, b1, b2, b3 = data[pos : pos + 4]
        if b0 == 2 and b1 == 2 and (b2 << 8 | b3) == width and width >= 8:
            pos += 4
            for ch in range(4):
                x = 0
                while x < width:
                    if pos >= len(data):
                        raise SceneFormatError(f"{path}: byte {pos}: truncated HDR RLE run")
                    count = data[pos]
                    pos += 1
                    if count > 128:  # run of one repeated value
                        run = count - 128
                        if x + run > width or pos >= len(data):
                            raise SceneFormatError(f"{path}: byte {pos}: bad HDR RLE run")
                        rgbe[y, x : x + run, ch] = data[pos]
                        pos += 1
                    else:  # literal values
                        run = count
                        if x + run > width or len(data) - pos < run:
                            raise SceneFormatError(f"{path}: byte {pos}: bad HDR literal run")
                        rgbe[y, x : x + run, ch] = np.frombuffer(
                            data, dtype=np.uint8, count=run, offset=pos
                        )
                        pos += run
                    x += run
        else:
            need = width * 4
            if len(data) - pos < need:
                raise SceneFormatError(f"{path}: byte {pos}: truncated HDR scanline {y}")
            rgbe[y] = np.frombuffer(data, dtype=np.uint8, count=need, offset=pos).reshape(
                width, 4
            )
            pos += need

    mantissa = rgbe[:, :, :3].astype(np.float32)
    exponent = rgbe[:, :, 3].astype(np.int32)
    scale = np.where(exponent == 0, 0.0, np.ldexp(1.0, exponent - 136)).astype(np.float32)
    texels = mantissa * scale[:, :, None]
    return Skybox(width, height, texels)


# --- benchmark scene ------------------------------------------------------

# Indices of the benchmark spheres the physics system animates when serving.
BENCHMARK_DYNAMIC_SPHERES = [3, 4]


def build_benchmark_scene() -> Scene:
    """The fixed measurement scene: one light, five spheres, one plane.

    Sphere reflectivities span the whole [0, max] range; constants are pinned
    by the golden-image hash in the acceptance suite.
    """
    bodies = [
        Body.sphere((-2.4, 1.0, 2.8), 1.0, (0.85, 0.10, 0.10), 96.0),
        Body.sphere((0.0, 0.8, 1.6), 0.8, (0.10, 0.55, 0.12), 32.0),
        Body.sphere((2.3, 1.2, 3.2), 1.2, (0.12, 0.30, 0.85), 128.0),
        Body.sphere((1.1, 0.5, 0.4), 0.5, (0.90, 0.75, 0.12), 64.0),
        Body.sphere((-0.9, 0.4, 0.0), 0.4, (0.90, 0.90, 0.90), 0.0),
        Body.plane(0.0, (0.42, 0.45, 0.50), 16.0),
    ]
    light = Light(position=(-4.0, 7.0, -2.0), radius=0.6, color=(1.0, 1.0, 1.0))
    return Scene(bodies=bodies, light=light, ambient=0.15, max_reflectivity=128.0)


def benchmark_camera() -> Camera:
    return Camera(position=(0.0, 1.4, -4.5), yaw=0.0, pitch=-0.08, fov=60.0)
