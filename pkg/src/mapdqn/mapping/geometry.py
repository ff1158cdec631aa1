"""Pinhole-camera geometry: back-projection, axis conventions, rigid transforms.

Conventions used throughout the package:

* world frame: x east, y north, z up; heading 0 looks along +x, headings grow
  counter-clockwise.
* camera frame: x right, y down, z forward.
* depth images are (height, width) arrays. Two depth conventions exist: the
  renderer emits *ray depth* (Euclidean distance along the pixel ray) while
  back-projection consumes *planar depth* (the camera-frame z coordinate).
  ``ray_depth_to_planar`` converts between them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Wrap an angle to [0, 2*pi)."""
    return a % TWO_PI


def angle_diff(a: float, b: float) -> float:
    """Smallest signed difference a-b in (-pi, pi]."""
    d = (a - b) % TWO_PI
    if d > math.pi:
        d -= TWO_PI
    return d


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError(f"focal lengths must be positive, got fx={self.fx} fy={self.fy}")
        if not (0 <= self.cx < self.width) or not (0 <= self.cy < self.height):
            raise ValueError(f"principal point ({self.cx}, {self.cy}) outside image")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")

    @classmethod
    def from_fov(cls, fov_deg: float, width: int, height: int) -> "CameraIntrinsics":
        """Square-pixel intrinsics from a horizontal field of view.

        The principal point sits at the symmetric pixel center (width-1)/2 so
        integer pixel coordinates map to rays symmetric about the optical axis.
        """
        f = (width / 2.0) / math.tan(math.radians(fov_deg) / 2.0)
        return cls(fx=f, fy=f, cx=(width - 1) / 2.0, cy=(height - 1) / 2.0,
                   width=width, height=height)

    def pixel_dirs(self) -> tuple[np.ndarray, np.ndarray]:
        """Normalized image-plane coordinates ((u-cx)/fx, (v-cy)/fy) as 1-D arrays."""
        xr = (np.arange(self.width, dtype=np.float64) - self.cx) / self.fx
        yr = (np.arange(self.height, dtype=np.float64) - self.cy) / self.fy
        return xr, yr

    def ray_norms(self) -> np.ndarray:
        """(H, W) array of |[(u-cx)/fx, (v-cy)/fy, 1]| for every pixel."""
        xr, yr = self.pixel_dirs()
        return np.sqrt(1.0 + xr[None, :] ** 2 + yr[:, None] ** 2)


@dataclass
class VertexMap:
    """Per-pixel camera-frame 3D points with a validity mask.

    ``points`` is (H, W, 3); invalid entries are zeroed and flagged False in
    ``valid``. Valid entries satisfy points[v, u, 2] == depth[v, u].
    """

    points: np.ndarray
    valid: np.ndarray

    def valid_points(self) -> np.ndarray:
        return self.points[self.valid]


def ray_depth_to_planar(ray_depth: np.ndarray, K: CameraIntrinsics) -> np.ndarray:
    """Convert Euclidean along-ray distances to camera-frame z depths."""
    if ray_depth.shape != (K.height, K.width):
        raise ValueError(f"depth shape {ray_depth.shape} does not match intrinsics "
                         f"({K.height}, {K.width})")
    return ray_depth / K.ray_norms()


def backproject(depth: np.ndarray, K: CameraIntrinsics,
                object_mask: np.ndarray | None = None) -> VertexMap:
    """Back-project a planar depth image into camera-frame 3D points.

    Valid pixels map to (d*(u-cx)/fx, d*(v-cy)/fy, d). Pixels flagged True in
    ``object_mask`` and pixels with non-finite or non-positive depth are
    invalid.
    """
    if depth.shape != (K.height, K.width):
        raise ValueError(f"depth shape {depth.shape} does not match intrinsics "
                         f"({K.height}, {K.width})")
    if object_mask is not None and object_mask.shape != depth.shape:
        raise ValueError(f"mask shape {object_mask.shape} does not match depth {depth.shape}")

    valid = np.isfinite(depth) & (depth > 0)
    if object_mask is not None:
        valid &= ~object_mask

    xr, yr = K.pixel_dirs()
    pts = np.zeros(depth.shape + (3,), dtype=np.float64)
    d = np.where(valid, depth, 0.0)
    pts[..., 0] = d * xr[None, :]
    pts[..., 1] = d * yr[:, None]
    pts[..., 2] = d
    return VertexMap(points=pts, valid=valid)


def camera_to_world_axes(points: np.ndarray) -> np.ndarray:
    """Re-express camera-frame points in world axis order for a heading-0 camera.

    (X right, Y down, Z forward) -> (Z, -X, -Y): forward becomes east, right
    becomes south, down becomes -up.
    """
    points = np.asarray(points, dtype=np.float64)
    out = np.empty_like(points)
    out[..., 0] = points[..., 2]
    out[..., 1] = -points[..., 0]
    out[..., 2] = -points[..., 1]
    return out


@dataclass(frozen=True)
class RigidTransform:
    """Planar rigid motion: rotation about the world up-axis, then translation."""

    angle: float = 0.0
    tx: float = 0.0
    ty: float = 0.0
    tz: float = 0.0

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls()

    @classmethod
    def from_pose(cls, x: float, y: float, heading: float, z: float = 0.0) -> "RigidTransform":
        return cls(angle=heading, tx=x, ty=y, tz=z)

    @property
    def translation(self) -> np.ndarray:
        return np.array([self.tx, self.ty, self.tz], dtype=np.float64)

    def rotation_matrix(self) -> np.ndarray:
        c, s = math.cos(self.angle), math.sin(self.angle)
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation_matrix()
        m[:3, 3] = self.translation
        return m

    def apply(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        return points @ self.rotation_matrix().T + self.translation

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """self o other: apply ``other`` first, then self."""
        t = self.apply(other.translation)
        return RigidTransform(angle=self.angle + other.angle,
                              tx=t[0], ty=t[1], tz=t[2])

    def inverse(self) -> "RigidTransform":
        c, s = math.cos(-self.angle), math.sin(-self.angle)
        tx = -(c * self.tx - s * self.ty)
        ty = -(s * self.tx + c * self.ty)
        return RigidTransform(angle=-self.angle, tx=tx, ty=ty, tz=-self.tz)


def to_global(vm: VertexMap | np.ndarray, T: RigidTransform) -> np.ndarray:
    """Map valid camera points into the global frame by T (rotation then translation).

    Accepts a VertexMap (only valid points are transformed) or an (N, 3)
    array. Callers working with raw camera-frame points apply
    ``camera_to_world_axes`` first; ``to_global`` itself is a pure planar
    rigid motion, so the identity transform is a no-op.
    """
    pts = vm.valid_points() if isinstance(vm, VertexMap) else np.asarray(vm, dtype=np.float64)
    return T.apply(pts)


def camera_pose_transform(x: float, y: float, heading: float,
                          camera_height: float) -> RigidTransform:
    """Rigid transform placing a camera at (x, y, camera_height) facing ``heading``.

    Compose with ``camera_to_world_axes`` to take camera-frame points to world:
    world = T.apply(camera_to_world_axes(p_cam)).
    """
    return RigidTransform(angle=heading, tx=x, ty=y, tz=camera_height)
