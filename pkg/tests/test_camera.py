import math

import pytest
from hypothesis import given, settings, strategies as st

from raytracer import vecmath as vm
from raytracer.camera import (
    Camera,
    Viewport,
    camera_viewport_distance,
    norm_screen_coords,
    primary_ray,
)


class TestNormScreenCoords:
    def test_center_pixel_is_origin(self):
        assert norm_screen_coords(640, 360, 1280, 720) == (0.0, 0.0)

    def test_top_left_wide_window(self):
        u, v = norm_screen_coords(0, 0, 1280, 720)
        assert u == pytest.approx(-1.7777777777777777, abs=1e-9)
        assert v == 1.0

    def test_square_window_center(self):
        assert norm_screen_coords(512, 512, 1024, 1024) == (0.0, 0.0)

    def test_tall_window_uses_else_branch(self):
        u, v = norm_screen_coords(0, 0, 720, 1280)
        assert u == -1.0
        assert v == pytest.approx(1.7777777777777777, abs=1e-9)

    def test_out_of_range_pixel_rejected(self):
        with pytest.raises(ValueError):
            norm_screen_coords(1280, 0, 1280, 720)
        with pytest.raises(ValueError):
            norm_screen_coords(0, -1, 1280, 720)

    def test_injective_over_pixel_lattice(self):
        seen = set()
        for y in range(48):
            for x in range(64):
                seen.add(norm_screen_coords(x, y, 64, 48))
        assert len(seen) == 64 * 48

    def test_v_decreases_down_the_window(self):
        vs = [norm_screen_coords(10, y, 64, 48)[1] for y in range(48)]
        assert all(a > b for a, b in zip(vs, vs[1:]))


class TestViewportDistance:
    def test_right_angle_fov(self):
        assert camera_viewport_distance(90.0) == pytest.approx(1.0, abs=1e-12)

    def test_narrow_fov(self):
        assert camera_viewport_distance(60.0) == pytest.approx(1.7320508075688772, abs=1e-9)

    def test_wide_fov(self):
        assert camera_viewport_distance(120.0) == pytest.approx(0.5773502691896257, abs=1e-9)

    @given(st.floats(min_value=1.0, max_value=178.0))
    def test_monotonically_decreasing_in_fov(self, fov):
        assert camera_viewport_distance(fov) > camera_viewport_distance(fov + 1.0)


class TestPrimaryRay:
    def test_center_pixel_looks_forward(self):
        for fov in (30.0, 60.0, 90.0, 150.0):
            cam = Camera(position=(1.0, 2.0, 3.0), fov=fov)
            ray = primary_ray(640, 360, cam, Viewport(1280, 720))
            assert ray.origin == (1.0, 2.0, 3.0)
            assert ray.direction == pytest.approx((0, 0, 1), abs=1e-9)

    def test_center_pixel_with_yaw(self):
        cam = Camera(yaw=math.pi / 2)
        ray = primary_ray(640, 360, cam, Viewport(1280, 720))
        assert ray.direction == pytest.approx((1, 0, 0), abs=1e-9)

    def test_left_edge_pixel(self):
        cam = Camera(fov=90.0)
        ray = primary_ray(0, 360, cam, Viewport(1280, 720))
        want = vm.normalize((-1.7777777777777777, 0.0, 1.0))
        assert ray.direction == pytest.approx(want, abs=1e-9)

    def test_out_of_range_pixel_rejected(self):
        with pytest.raises(ValueError):
            primary_ray(64, 0, Camera(), Viewport(64, 48))

    @settings(max_examples=50)
    @given(
        st.integers(min_value=0, max_value=63),
        st.integers(min_value=0, max_value=47),
        st.floats(min_value=-3.0, max_value=3.0),
        st.floats(min_value=-1.5, max_value=1.5),
        st.floats(min_value=5.0, max_value=175.0),
    )
    def test_direction_always_unit(self, x, y, yaw, pitch, fov):
        cam = Camera(yaw=yaw, pitch=pitch, fov=fov)
        ray = primary_ray(x, y, cam, Viewport(64, 48))
        assert abs(vm.magnitude(ray.direction) - 1.0) < 1e-5


class TestCameraType:
    def test_fov_range_enforced(self):
        with pytest.raises(ValueError):
            Camera(fov=0.0)
        with pytest.raises(ValueError):
            Camera(fov=180.0)

    def test_pitch_clamped(self):
        limit = math.pi / 2 - 1e-3
        assert Camera(pitch=2.0).pitch == pytest.approx(limit)
        assert Camera(pitch=-2.0).pitch == pytest.approx(-limit)

    def test_viewport_validation(self):
        with pytest.raises(ValueError):
            Viewport(0, 10)
