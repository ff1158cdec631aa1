import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mapdqn.mapping.geometry import (
    CameraIntrinsics,
    RigidTransform,
    backproject,
    camera_to_world_axes,
    ray_depth_to_planar,
    to_global,
)


def unit_K():
    return CameraIntrinsics(fx=1.0, fy=1.0, cx=0.0, cy=0.0, width=4, height=3)


class TestBackproject:
    def test_principal_ray(self):
        K = CameraIntrinsics(fx=10.0, fy=10.0, cx=2.0, cy=1.0, width=5, height=3)
        depth = np.full((3, 5), 5.0)
        vm = backproject(depth, K)
        np.testing.assert_allclose(vm.points[1, 2], [0.0, 0.0, 5.0])

    def test_direct_substitution(self):
        # fx=fy=1, cx=cy=0, pixel (u=2, v=1), depth 3 -> (6, 3, 3)
        depth = np.full((3, 4), 3.0)
        vm = backproject(depth, unit_K())
        np.testing.assert_allclose(vm.points[1, 2], [6.0, 3.0, 3.0])

    def test_masked_pixels_invalid(self):
        depth = np.full((3, 4), 2.0)
        mask = np.zeros((3, 4), dtype=bool)
        mask[0, 1] = True
        vm = backproject(depth, unit_K(), mask)
        assert not vm.valid[0, 1]
        assert vm.valid.sum() == 11
        np.testing.assert_array_equal(vm.points[0, 1], 0.0)

    def test_nonpositive_depth_invalid(self):
        depth = np.full((3, 4), 1.0)
        depth[2, 3] = 0.0
        depth[0, 0] = np.inf
        vm = backproject(depth, unit_K())
        assert not vm.valid[2, 3] and not vm.valid[0, 0]

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            backproject(np.ones((4, 4)), unit_K())
        with pytest.raises(ValueError):
            backproject(np.ones((3, 4)), unit_K(), np.zeros((3, 5), dtype=bool))

    def test_roundtrip_against_forward_projection(self):
        # Oracle: forward pinhole projection u = fx*X/Z + cx recovers the pixel grid.
        rng = np.random.default_rng(1)
        K = CameraIntrinsics.from_fov(90.0, 16, 12)
        depth = rng.uniform(0.5, 10.0, size=(12, 16))
        vm = backproject(depth, K)
        X, Y, Z = vm.points[..., 0], vm.points[..., 1], vm.points[..., 2]
        u = K.fx * X / Z + K.cx
        v = K.fy * Y / Z + K.cy
        uu, vv = np.meshgrid(np.arange(16), np.arange(12))
        np.testing.assert_allclose(u, uu, atol=1e-9)
        np.testing.assert_allclose(v, vv, atol=1e-9)
        np.testing.assert_allclose(Z, depth, atol=0)

    @given(st.floats(min_value=0.1, max_value=100.0))
    def test_depth_homogeneity(self, lam):
        rng = np.random.default_rng(7)
        K = CameraIntrinsics.from_fov(75.0, 8, 6)
        depth = rng.uniform(1.0, 5.0, size=(6, 8))
        a = backproject(depth, K).points
        b = backproject(depth * lam, K).points
        np.testing.assert_allclose(b, a * lam, rtol=1e-12)


class TestRayDepthConversion:
    def test_center_pixel_unchanged(self):
        K = CameraIntrinsics(fx=5.0, fy=5.0, cx=1.0, cy=1.0, width=3, height=3)
        ray = np.full((3, 3), 4.0)
        planar = ray_depth_to_planar(ray, K)
        assert planar[1, 1] == pytest.approx(4.0)
        # off-axis pixels foreshorten
        assert planar[0, 0] < 4.0

    def test_matches_norm_formula(self):
        K = CameraIntrinsics.from_fov(90.0, 8, 8)
        rng = np.random.default_rng(3)
        ray = rng.uniform(1, 9, size=(8, 8))
        xr, yr = K.pixel_dirs()
        n = np.sqrt(1 + xr[None, :] ** 2 + yr[:, None] ** 2)
        np.testing.assert_allclose(ray_depth_to_planar(ray, K), ray / n)


class TestRigidTransform:
    def test_identity_is_noop(self):
        pts = np.random.default_rng(0).normal(size=(10, 3))
        np.testing.assert_array_equal(to_global(pts, RigidTransform.identity()), pts)

    def test_pure_translation(self):
        pts = np.random.default_rng(1).normal(size=(10, 3))
        T = RigidTransform(tx=1.0)
        np.testing.assert_allclose(to_global(pts, T), pts + [1.0, 0.0, 0.0])

    def test_matrix_oracle(self):
        # Oracle: explicit 4x4 homogeneous multiplication.
        T = RigidTransform(angle=math.pi / 2, tx=2.0, ty=3.0, tz=0.0)
        p_cam = np.array([0.0, 0.0, 1.0])
        p_aligned = camera_to_world_axes(p_cam)
        m = T.matrix()
        hom = m @ np.append(p_aligned, 1.0)
        np.testing.assert_allclose(to_global(p_aligned[None, :], T)[0], hom[:3], atol=1e-12)
        np.testing.assert_allclose(hom[:3], [2.0, 4.0, 0.0], atol=1e-12)

    def test_axis_convention(self):
        # camera: x right, y down, z forward; heading 0 faces +x (east).
        fwd, down, right = [0, 0, 1.0], [0, 1.0, 0], [1.0, 0, 0]
        np.testing.assert_allclose(camera_to_world_axes(np.array(fwd)), [1, 0, 0])
        np.testing.assert_allclose(camera_to_world_axes(np.array(down)), [0, 0, -1])
        np.testing.assert_allclose(camera_to_world_axes(np.array(right)), [0, -1, 0])

    @given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0, 2 * math.pi))
    @settings(max_examples=50)
    def test_compose_inverse_is_identity(self, tx, ty, ang):
        T = RigidTransform(angle=ang, tx=tx, ty=ty, tz=0.5)
        I = T.compose(T.inverse())
        assert abs(I.angle % (2 * math.pi)) < 1e-12 or abs(I.angle % (2 * math.pi) - 2 * math.pi) < 1e-12
        np.testing.assert_allclose(I.translation, 0.0, atol=1e-12)
        pts = np.random.default_rng(5).normal(size=(6, 3))
        np.testing.assert_allclose(I.apply(pts), pts, atol=1e-12)

    @given(st.floats(-4, 4), st.floats(-4, 4), st.floats(0, 2 * math.pi))
    @settings(max_examples=50)
    def test_isometry(self, tx, ty, ang):
        T = RigidTransform(angle=ang, tx=tx, ty=ty, tz=1.0)
        pts = np.random.default_rng(9).normal(size=(8, 3))
        out = T.apply(pts)
        d_in = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
        d_out = np.linalg.norm(out[:, None] - out[None, :], axis=2)
        np.testing.assert_allclose(d_out, d_in, atol=1e-9)

    def test_compose_order(self):
        A = RigidTransform(angle=math.pi / 2)
        B = RigidTransform(tx=1.0)
        # A o B: translate then rotate.
        p = np.array([[0.0, 0.0, 0.0]])
        np.testing.assert_allclose(A.compose(B).apply(p)[0], [0.0, 1.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(B.compose(A).apply(p)[0], [1.0, 0.0, 0.0], atol=1e-12)


class TestIntrinsics:
    def test_validation(self):
        with pytest.raises(ValueError):
            CameraIntrinsics(fx=0.0, fy=1.0, cx=0, cy=0, width=4, height=4)
        with pytest.raises(ValueError):
            CameraIntrinsics(fx=1.0, fy=1.0, cx=5.0, cy=0, width=4, height=4)

    def test_from_fov_symmetric(self):
        K = CameraIntrinsics.from_fov(90.0, 84, 84)
        assert K.cx == pytest.approx(41.5)
        assert K.fx == pytest.approx(42.0)
        xr, _ = K.pixel_dirs()
        np.testing.assert_allclose(xr, -xr[::-1])
