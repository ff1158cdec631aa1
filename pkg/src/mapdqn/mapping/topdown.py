"""Fixed-size top-down semantic maps.

A map is a single-channel N x N image. Walls paint first, object categories
overwrite walls (later detections overwrite earlier ones), and the agent
marker paints last. Only objects visible in the current frame are drawn;
walls persist via the voxel grid (reconstructed maps) or come from the true
arena grid (oracle maps).

Wall geometry is rasterized as voxel-thick strips on the floor-facing faces
of wall cells -- the surface skin that depth fusion can actually observe --
so oracle and reconstructed maps rasterize the same geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..arena.spec import ArenaSpec, EntityCategory
from .geometry import CameraIntrinsics, RigidTransform, camera_to_world_axes, ray_depth_to_planar
from .noise import EpisodeNoise
from .voxel import LABEL_STRUCTURE, VoxelHashGrid

Window = tuple[float, float, float, float]


@dataclass(frozen=True)
class EncodingTable:
    """Category -> gray value. Injective by construction; 0 is unknown/free."""

    walls: int = 255
    monster: int = 220
    health: int = 180
    high_weapon: int = 140
    high_ammo: int = 100
    other: int = 60
    agent_body: int = 40
    agent_tip: int = 30
    unknown: int = 0

    def __post_init__(self):
        vals = self.all_values()
        if len(set(vals)) != len(vals):
            raise ValueError("encoding values must be distinct")
        if any(v < 0 or v > 255 for v in vals):
            raise ValueError("encoding values must lie in [0, 255]")

    def all_values(self) -> tuple[int, ...]:
        return (self.walls, self.monster, self.health, self.high_weapon,
                self.high_ammo, self.other, self.agent_body, self.agent_tip,
                self.unknown)

    def for_category(self, cat: EntityCategory) -> int:
        return {
            EntityCategory.MONSTER: self.monster,
            EntityCategory.HEALTH_PACK: self.health,
            EntityCategory.HIGH_GRADE_WEAPON: self.high_weapon,
            EntityCategory.HIGH_GRADE_AMMO: self.high_ammo,
            EntityCategory.OTHER_PICKUP: self.other,
        }[cat]

    def category_values(self) -> dict[EntityCategory, int]:
        return {cat: self.for_category(cat) for cat in EntityCategory}


@dataclass(frozen=True)
class MapAffine:
    """World (x, y) -> pixel (row, col): col = floor((x - xmin) * scale),
    row = floor((ymax - y) * scale). North (large y) is the top row."""

    scale: float
    xmin: float
    ymax: float
    size: int

    @classmethod
    def for_window(cls, window: Window, size: int) -> "MapAffine":
        xmin, ymin, xmax, ymax = window
        w, h = xmax - xmin, ymax - ymin
        if w <= 0 or h <= 0:
            raise ValueError(f"degenerate window {window}")
        return cls(scale=size / max(w, h), xmin=xmin, ymax=ymax, size=size)

    def to_pixel(self, x: float, y: float) -> tuple[int, int]:
        return (int(math.floor((self.ymax - y) * self.scale)),
                int(math.floor((x - self.xmin) * self.scale)))

    def in_bounds(self, row: int, col: int) -> bool:
        return 0 <= row < self.size and 0 <= col < self.size


@dataclass
class SemanticMap2D:
    image: np.ndarray             # (N, N) uint8 of encoding values
    affine: MapAffine
    agent_pixel: tuple[int, int] | None = None
    agent_heading: float = 0.0

    @property
    def size(self) -> int:
        return self.image.shape[0]

    def as_float(self) -> np.ndarray:
        return self.image.astype(np.float32) / 255.0


def _fill_rect(img: np.ndarray, affine: MapAffine,
               x0: float, y0: float, x1: float, y1: float, value: int) -> None:
    """Rasterize the world rectangle [x0,x1) x [y0,y1) with half-open pixel rules."""
    c0 = int(math.floor((x0 - affine.xmin) * affine.scale))
    c1 = int(math.ceil((x1 - affine.xmin) * affine.scale))
    r0 = int(math.floor((affine.ymax - y1) * affine.scale))
    r1 = int(math.ceil((affine.ymax - y0) * affine.scale))
    c0, c1 = max(c0, 0), min(c1, affine.size)
    r0, r1 = max(r0, 0), min(r1, affine.size)
    if c0 < c1 and r0 < r1:
        img[r0:r1, c0:c1] = value


def _fill_disk(img: np.ndarray, affine: MapAffine,
               x: float, y: float, radius: float, value: int) -> None:
    r_px = max(radius * affine.scale, 0.5)
    row_c = (affine.ymax - y) * affine.scale
    col_c = (x - affine.xmin) * affine.scale
    r0 = max(int(math.floor(row_c - r_px)), 0)
    r1 = min(int(math.ceil(row_c + r_px)) + 1, affine.size)
    c0 = max(int(math.floor(col_c - r_px)), 0)
    c1 = min(int(math.ceil(col_c + r_px)) + 1, affine.size)
    if r0 >= r1 or c0 >= c1:
        return
    rr, cc = np.meshgrid(np.arange(r0, r1) + 0.5, np.arange(c0, c1) + 0.5, indexing="ij")
    inside = (rr - row_c) ** 2 + (cc - col_c) ** 2 <= r_px ** 2
    img[r0:r1, c0:c1][inside] = value


def _paint_agent(m: SemanticMap2D, x: float, y: float, heading: float,
                 enc: EncodingTable) -> None:
    """Three-pixel directed marker: two body pixels and a distinct tip pixel."""
    row, col = m.affine.to_pixel(x, y)
    drow = -math.sin(heading)     # rows grow southward
    dcol = math.cos(heading)
    tip = (int(round(row + drow * 1.5)), int(round(col + dcol * 1.5)))
    rear = (int(round(row - drow * 1.5)), int(round(col - dcol * 1.5)))
    if tip == (row, col):
        tip = (row + int(np.sign(drow)) if abs(drow) >= abs(dcol) else row,
               col + int(np.sign(dcol)) if abs(dcol) > abs(drow) else col)
    for r, c in (rear, (row, col)):
        if m.affine.in_bounds(r, c):
            m.image[r, c] = enc.agent_body
    if m.affine.in_bounds(*tip):
        m.image[tip] = enc.agent_tip
    m.agent_pixel = (row, col)
    m.agent_heading = heading


def _paint_objects(m: SemanticMap2D, objects, enc: EncodingTable,
                   object_radius: float) -> None:
    for cat, (x, y) in objects:
        _fill_disk(m.image, m.affine, x, y, object_radius, enc.for_category(cat))


def new_map(window: Window, size: int) -> SemanticMap2D:
    affine = MapAffine.for_window(window, size)
    return SemanticMap2D(image=np.zeros((size, size), dtype=np.uint8), affine=affine)


def project_topdown(grid: VoxelHashGrid, agent_pose: tuple[float, float, float],
                    detections, enc: EncodingTable, window: Window,
                    z_low: float, z_high: float, size: int = 84,
                    object_radius: float = 0.28, min_hits: int = 1,
                    localisation_only: bool = False) -> SemanticMap2D:
    """Top-down view of the fused voxel grid plus currently visible objects.

    ``detections`` is an iterable with .category and .world_pos attributes
    (world_pos None entries are skipped). Voxels whose center z lies outside
    [z_low, z_high] contribute nothing.
    """
    if z_low >= z_high:
        raise ValueError(f"invalid height band [{z_low}, {z_high}]")
    m = new_map(window, size)
    keys = grid.band_voxels(z_low, z_high, label=LABEL_STRUCTURE, min_hits=min_hits)
    vs = grid.voxel_size
    for ix, iy, _ in keys:
        _fill_rect(m.image, m.affine, ix * vs, iy * vs, (ix + 1) * vs, (iy + 1) * vs,
                   enc.walls)
    if not localisation_only:
        objs = [(d.category, tuple(d.world_pos)) for d in detections
                if d.world_pos is not None]
        _paint_objects(m, objs, enc, object_radius)
    _paint_agent(m, agent_pose[0], agent_pose[1], agent_pose[2], enc)
    return m


def wall_face_strips(spec: ArenaSpec, strip: float) -> np.ndarray:
    """(N, 5) rows (x0, y0, x1, y1, cell_id) of floor-facing wall skin rectangles.

    ``strip`` is the skin thickness in world units (one voxel). cell_id indexes
    the wall cell a strip belongs to, for per-cell noise offsets.
    """
    cs = spec.cell_size
    rows = []
    wall_list = spec.wall_cells()
    for cell_id, (ix, iy) in enumerate(wall_list):
        x0, y0 = ix * cs, iy * cs
        if not spec.is_wall(ix - 1, iy):      # floor to the west
            rows.append((x0, y0, x0 + strip, y0 + cs, cell_id))
        if not spec.is_wall(ix + 1, iy):      # east
            rows.append((x0 + cs - strip, y0, x0 + cs, y0 + cs, cell_id))
        if not spec.is_wall(ix, iy - 1):      # south
            rows.append((x0, y0, x0 + cs, y0 + strip, cell_id))
        if not spec.is_wall(ix, iy + 1):      # north
            rows.append((x0, y0 + cs - strip, x0 + cs, y0 + cs, cell_id))
    if not rows:
        return np.zeros((0, 5))
    return np.array(rows, dtype=np.float64)


def oracle_map(spec: ArenaSpec, agent_pose: tuple[float, float, float],
               visible_objects, enc: EncodingTable,
               window: Window | None = None, size: int = 84,
               strip: float | None = None, noise: EpisodeNoise | None = None,
               localisation_only: bool = False,
               object_radius: float | None = None) -> SemanticMap2D:
    """Ground-truth top-down map: true wall grid, true poses, no perception.

    ``visible_objects`` is an iterable of (EntityCategory, (x, y)) for objects
    visible in the current frame only. ``noise`` displaces walls per cell and
    agent/object positions per the episode's fixed offsets.
    """
    window = window or spec.window()
    strip = strip if strip is not None else spec.cell_size / 4.0
    object_radius = object_radius if object_radius is not None else spec.params.entity_radius
    m = new_map(window, size)

    for x0, y0, x1, y1, cell_id in wall_face_strips(spec, strip):
        dx = dy = 0.0
        if noise is not None:
            dx, dy = noise.wall_offset(int(cell_id))
        _fill_rect(m.image, m.affine, x0 + dx, y0 + dy, x1 + dx, y1 + dy, enc.walls)

    if not localisation_only:
        objs = []
        for k, (cat, (x, y)) in enumerate(visible_objects):
            dx = dy = 0.0
            if noise is not None:
                dx, dy = noise.entity_offset(k, cat)
            objs.append((cat, (x + dx, y + dy)))
        _paint_objects(m, objs, enc, object_radius)

    ax, ay, ah = agent_pose
    if noise is not None:
        dx, dy = noise.agent_offset()
        ax, ay = ax + dx, ay + dy
    _paint_agent(m, ax, ay, ah, enc)
    return m


def estimate_entity_world_pos(bbox: tuple[float, float, float, float],
                              ray_depth: np.ndarray, K: CameraIntrinsics,
                              agent_pose_transform: RigidTransform) -> tuple[float, float]:
    """World (x, y) of a detected object: bbox-center pixel back-projected at
    the median depth inside the bbox, then taken to the global frame.

    Raises ValueError when the bbox contains no finite depth.
    """
    x0, y0, x1, y1 = bbox
    c0, c1 = max(int(math.floor(x0)), 0), min(int(math.ceil(x1)), K.width)
    r0, r1 = max(int(math.floor(y0)), 0), min(int(math.ceil(y1)), K.height)
    if c0 >= c1 or r0 >= r1:
        raise ValueError(f"bbox {bbox} outside image")
    patch = ray_depth[r0:r1, c0:c1]
    patch = patch[np.isfinite(patch) & (patch > 0)]
    if patch.size == 0:
        raise ValueError("bbox contains no valid depth")
    d_ray = float(np.median(patch))

    uc, vc = (x0 + x1) / 2.0, (y0 + y1) / 2.0
    norm = math.sqrt(1.0 + ((uc - K.cx) / K.fx) ** 2 + ((vc - K.cy) / K.fy) ** 2)
    z = d_ray / norm
    p_cam = np.array([z * (uc - K.cx) / K.fx, z * (vc - K.cy) / K.fy, z])
    p_world = agent_pose_transform.apply(camera_to_world_axes(p_cam))
    return (float(p_world[0]), float(p_world[1]))


def decode_categories(m: SemanticMap2D, enc: EncodingTable) -> set[EntityCategory]:
    """Object categories present in a map, by gray value."""
    present = set(np.unique(m.image).tolist())
    return {cat for cat, v in enc.category_values().items() if v in present}
