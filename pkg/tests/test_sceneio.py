import io
import json
import math

import numpy as np
import pytest

from raytracer.geometry import BodyKind
from raytracer.scene import Framebuffer
from raytracer.sceneio import (
    SceneFormatError,
    build_benchmark_scene,
    benchmark_camera,
    load_scene,
    load_skybox,
    parse_scene,
    save_scene,
    serialize_scene,
    write_ppm,
)

SCENE_DOC = {
    "ambient": 0.2,
    "maxReflectivity": 128.0,
    "light": {"position": [-4.0, 7.0, -2.0], "radius": 0.6, "color": [1.0, 1.0, 1.0]},
    "plane": {"height": 0.0, "color": [0.4, 0.4, 0.5], "reflectivity": 16.0},
    "spheres": [
        {
            "position": [0.0, 1.0, 3.0],
            "radius": 1.0,
            "color": [0.8, 0.1, 0.1],
            "reflectivity": 64.0,
            "dynamic": True,
        },
        {
            "position": [2.0, 0.5, 2.0],
            "radius": 0.5,
            "color": [0.1, 0.8, 0.1],
            "reflectivity": 0.0,
            "dynamic": False,
        },
    ],
}


class TestSceneDocuments:
    def test_parse_basic_fields(self):
        scene, dynamic = parse_scene(SCENE_DOC)
        assert len(scene.bodies) == 3  # spheres first, plane last
        assert scene.bodies[0].kind == BodyKind.SPHERE
        assert scene.bodies[2].kind == BodyKind.HORIZONTAL_PLANE
        assert scene.ambient == 0.2
        assert scene.light.radius == 0.6
        assert dynamic == [0]

    def test_round_trip(self):
        scene, dynamic = parse_scene(SCENE_DOC)
        doc = serialize_scene(scene, dynamic)
        again, dynamic2 = parse_scene(doc)
        assert serialize_scene(again, dynamic2) == doc
        assert again == scene
        assert dynamic2 == dynamic

    def test_file_round_trip(self, tmp_path):
        scene, dynamic = parse_scene(SCENE_DOC)
        path = tmp_path / "scene.json"
        save_scene(scene, str(path), dynamic)
        loaded, loaded_dynamic = load_scene(str(path))
        assert loaded == scene
        assert loaded_dynamic == dynamic

    def test_missing_light_rejected(self):
        with pytest.raises(SceneFormatError, match="light"):
            parse_scene({"spheres": []})

    def test_bad_vector_rejected(self):
        doc = json.loads(json.dumps(SCENE_DOC))
        doc["spheres"][0]["position"] = [1, 2]
        with pytest.raises(SceneFormatError, match=r"spheres\[0\].position"):
            parse_scene(doc)

    def test_reflectivity_above_max_rejected(self):
        doc = json.loads(json.dumps(SCENE_DOC))
        doc["spheres"][0]["reflectivity"] = 200.0
        with pytest.raises(SceneFormatError, match="reflectivity"):
            parse_scene(doc)

    def test_invalid_json_reports_line(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"ambient": 0.1,,}')
        with pytest.raises(SceneFormatError, match="line 1"):
            load_scene(str(path))

    def test_plane_optional(self):
        doc = json.loads(json.dumps(SCENE_DOC))
        del doc["plane"]
        scene, _ = parse_scene(doc)
        assert all(b.kind == BodyKind.SPHERE for b in scene.bodies)


class TestWritePPM:
    def render_bytes(self, pixels, width, height):
        fb = Framebuffer(width, height, np.array(pixels, dtype=np.uint32))
        sink = io.BytesIO()
        write_ppm(fb, sink)
        return sink.getvalue()

    def test_single_black_pixel(self):
        assert self.render_bytes([0xFF000000], 1, 1) == b"P6\n1 1\n255\n\x00\x00\x00"

    def test_single_white_pixel(self):
        assert self.render_bytes([0xFFFFFFFF], 1, 1) == b"P6\n1 1\n255\n\xff\xff\xff"

    def test_red_blue_pack_order(self):
        got = self.render_bytes([0xFFFF0000, 0xFF0000FF], 2, 1)
        assert got == b"P6\n2 1\n255\n\xff\x00\x00\x00\x00\xff"

    def test_bit_identical_across_runs(self):
        pix = np.arange(64, dtype=np.uint32) * 0x01010101 | 0xFF000000
        a = self.render_bytes(pix, 8, 8)
        b = self.render_bytes(pix, 8, 8)
        assert a == b


def ppm_bytes(width, height, rgb_rows):
    return b"P6\n%d %d\n255\n" % (width, height) + bytes(rgb_rows)


class TestLoadSkyboxPPM:
    def test_two_pixel_ppm(self, tmp_path):
        path = tmp_path / "sky.ppm"
        path.write_bytes(ppm_bytes(2, 1, [255, 0, 0, 0, 0, 255]))
        sky = load_skybox(str(path))
        assert sky.width == 2 and sky.height == 1
        assert sky.texels[0, 0].tolist() == [1.0, 0.0, 0.0]
        assert sky.texels[0, 1].tolist() == [0.0, 0.0, 1.0]

    def test_missing_file_errors(self, tmp_path):
        with pytest.raises(SceneFormatError, match="cannot read"):
            load_skybox(str(tmp_path / "nope.ppm"))

    def test_gradient_indexing(self, tmp_path):
        width, height = 4, 2
        data = []
        for y in range(height):
            for x in range(width):
                data += [x * 60, y * 100, 7]
        path = tmp_path / "grad.ppm"
        path.write_bytes(ppm_bytes(width, height, data))
        sky = load_skybox(str(path))
        assert sky.texels[1, 3].tolist() == pytest.approx([180 / 255, 100 / 255, 7 / 255])

    def test_truncated_reports_position(self, tmp_path):
        path = tmp_path / "trunc.ppm"
        path.write_bytes(b"P6\n2 2\n255\n\xff\x00")
        with pytest.raises(SceneFormatError, match="byte"):
            load_skybox(str(path))

    def test_comments_in_header(self, tmp_path):
        path = tmp_path / "sky.ppm"
        path.write_bytes(b"P6\n# a comment\n1 1\n255\n\x10\x20\x30")
        sky = load_skybox(str(path))
        assert sky.width == 1 and sky.height == 1


def hdr_bytes(width, height, rgbe_rows):
    header = b"#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y %d +X %d\n" % (height, width)
    return header + bytes(rgbe_rows)


class TestLoadSkyboxHDR:
    def test_flat_scanlines_decode(self, tmp_path):
        # (128, 64, 32, 129) -> (1.0, 0.5, 0.25): ldexp(1, 129-136) = 1/128
        path = tmp_path / "sky.hdr"
        path.write_bytes(hdr_bytes(2, 1, [128, 64, 32, 129, 0, 0, 0, 0]))
        sky = load_skybox(str(path))
        assert sky.texels[0, 0].tolist() == pytest.approx([1.0, 0.5, 0.25])
        assert sky.texels[0, 1].tolist() == [0.0, 0.0, 0.0]

    def test_rle_scanline_decode(self, tmp_path):
        width = 8
        # new-style RLE: marker then per-channel runs (one run of 8 per channel)
        line = bytes([2, 2, 0, width]) + bytes(
            [128 + width, 128, 128 + width, 64, 128 + width, 32, 128 + width, 129]
        )
        path = tmp_path / "rle.hdr"
        path.write_bytes(hdr_bytes(width, 1, line))
        sky = load_skybox(str(path))
        for x in range(width):
            assert sky.texels[0, x].tolist() == pytest.approx([1.0, 0.5, 0.25])

    def test_hdr_preserves_values_above_one(self, tmp_path):
        # mantissa 128 at exponent 130 decodes to 128 * 2^-6 = 2.0
        path = tmp_path / "bright.hdr"
        path.write_bytes(hdr_bytes(1, 1, [128, 128, 128, 130]))
        sky = load_skybox(str(path))
        assert sky.texels[0, 0].tolist() == pytest.approx([2.0, 2.0, 2.0])

    def test_truncated_reports_position(self, tmp_path):
        path = tmp_path / "trunc.hdr"
        path.write_bytes(hdr_bytes(2, 2, [128, 64, 32, 129]))
        with pytest.raises(SceneFormatError, match="byte"):
            load_skybox(str(path))

    def test_unknown_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.img"
        path.write_bytes(b"BM....not an image")
        with pytest.raises(SceneFormatError, match="byte 0"):
            load_skybox(str(path))


class TestBenchmarkScene:
    def test_deterministic(self):
        assert build_benchmark_scene() == build_benchmark_scene()

    def test_body_census(self):
        scene = build_benchmark_scene()
        kinds = [b.kind for b in scene.bodies]
        assert len(scene.bodies) == 6
        assert kinds.count(BodyKind.SPHERE) == 5
        assert kinds.count(BodyKind.HORIZONTAL_PLANE) == 1

    def test_reflectivities_span_full_range(self):
        scene = build_benchmark_scene()
        refls = sorted(b.reflectivity for b in scene.bodies if b.kind == BodyKind.SPHERE)
        assert refls[0] == 0.0
        assert refls[-1] == scene.max_reflectivity

    def test_camera_valid(self):
        cam = benchmark_camera()
        assert 0 < cam.fov < 180
