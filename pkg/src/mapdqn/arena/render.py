"""Column-per-ray raycast renderer with an exact depth buffer.

Walls are axis-aligned grid cells traversed with a DDA; floor and ceiling are
the z=0 and z=wall_height planes; entities are screen-aligned textured
billboards. The depth buffer stores the Euclidean distance along each pixel
ray to the nearest surface, capped at max_range. That makes the buffer
directly checkable against an exhaustive per-cell intersection oracle;
``mapping.geometry.ray_depth_to_planar`` converts it to the z-depth that
back-projection consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..mapping.geometry import CameraIntrinsics
from .spec import EntityCategory

# Base colors: entities are saturated, structure is gray, so color-blob
# detection can separate them.
ENTITY_COLORS = {
    EntityCategory.MONSTER: (200, 30, 30),
    EntityCategory.HEALTH_PACK: (160, 32, 160),
    EntityCategory.HIGH_GRADE_WEAPON: (120, 60, 200),
    EntityCategory.HIGH_GRADE_AMMO: (40, 80, 220),
    EntityCategory.OTHER_PICKUP: (220, 200, 40),
}
FLOOR_COLOR = (55, 55, 55)
CEILING_COLOR = (105, 105, 105)
WALL_SHADE_X = 200    # faces perpendicular to x
WALL_SHADE_Y = 160


@dataclass(frozen=True)
class VisibleEntity:
    category: EntityCategory
    bbox: tuple[float, float, float, float]   # (x0, y0, x1, y1) pixels, inside image
    distance: float                            # planar camera-to-center distance
    world_pos: tuple[float, float]
    entity_id: int                             # placement index


@dataclass
class Observation:
    rgb: np.ndarray                            # (H, W, 3) uint8
    depth: np.ndarray                          # (H, W) float64, ray distances
    events: tuple[int, int] = (0, 0)           # (delta_health, kill_indicator)
    visible: list[VisibleEntity] = field(default_factory=list)


def cast_rays(grid: np.ndarray, cell_size: float, px: float, py: float,
              dirs: np.ndarray, max_range: float) -> tuple[np.ndarray, np.ndarray]:
    """Planar DDA for a batch of rays.

    ``dirs`` is (N, 2) (unnormalized is fine). Returns (distances, faces) where
    distance is the planar length to the first wall-cell boundary (max_range if
    the ray leaves the grid first, which cannot happen in a closed arena) and
    face is 0 for x-perpendicular hits, 1 for y-perpendicular hits.
    """
    n_rows, n_cols = grid.shape
    d = np.asarray(dirs, dtype=np.float64)
    norm = np.hypot(d[:, 0], d[:, 1])
    dx, dy = d[:, 0] / norm, d[:, 1] / norm

    ix = np.full(len(d), int(np.floor(px / cell_size)), dtype=np.int64)
    iy = np.full(len(d), int(np.floor(py / cell_size)), dtype=np.int64)
    step_x = np.where(dx >= 0, 1, -1)
    step_y = np.where(dy >= 0, 1, -1)
    with np.errstate(divide="ignore"):
        t_delta_x = np.abs(cell_size / dx)
        t_delta_y = np.abs(cell_size / dy)
    next_x = (ix + (step_x > 0)) * cell_size
    next_y = (iy + (step_y > 0)) * cell_size
    with np.errstate(divide="ignore", invalid="ignore"):
        t_max_x = np.where(dx != 0, (next_x - px) / dx, np.inf)
        t_max_y = np.where(dy != 0, (next_y - py) / dy, np.inf)

    dist = np.full(len(d), max_range, dtype=np.float64)
    face = np.zeros(len(d), dtype=np.int8)
    alive = np.ones(len(d), dtype=bool)

    while alive.any():
        use_x = alive & (t_max_x <= t_max_y)
        use_y = alive & ~use_x
        ix[use_x] += step_x[use_x]
        iy[use_y] += step_y[use_y]
        t_hit = np.where(use_x, t_max_x, t_max_y)
        t_max_x[use_x] += t_delta_x[use_x]
        t_max_y[use_y] += t_delta_y[use_y]

        oob = alive & ((ix < 0) | (ix >= n_cols) | (iy < 0) | (iy >= n_rows))
        alive &= ~oob
        hit = alive & grid[np.clip(iy, 0, n_rows - 1), np.clip(ix, 0, n_cols - 1)]
        dist[hit] = t_hit[hit]
        face[hit] = np.where(use_x[hit], 0, 1)
        alive &= ~hit
        beyond = alive & (t_hit > max_range)
        alive &= ~beyond
    return dist, face


def line_of_sight(grid: np.ndarray, cell_size: float,
                  ax: float, ay: float, bx: float, by: float) -> bool:
    """True when the segment a->b crosses no wall cell."""
    d = np.hypot(bx - ax, by - ay)
    if d < 1e-12:
        return True
    dist, _ = cast_rays(grid, cell_size, ax, ay,
                        np.array([[bx - ax, by - ay]]), max_range=d + cell_size)
    return bool(dist[0] >= d)


def render(state, camera: CameraIntrinsics) -> Observation:
    """Render the current game state. Pure: does not mutate ``state``."""
    spec = state.spec
    p = state.params
    agent = state.agent
    H, W = camera.height, camera.width
    ch = p.camera_height
    wall_h = p.wall_height
    max_range = spec.diagonal

    xr, yr = camera.pixel_dirs()
    n3 = camera.ray_norms()                       # (H, W)

    # World-frame horizontal ray directions per column: forward + xr * right.
    cos_h, sin_h = np.cos(agent.heading), np.sin(agent.heading)
    fwd = np.array([cos_h, sin_h])
    right = np.array([sin_h, -cos_h])
    dirs = fwd[None, :] + xr[:, None] * right[None, :]

    s_plan, faces = cast_rays(spec.grid, spec.cell_size, agent.x, agent.y, dirs, max_range)
    z_cam = s_plan / np.sqrt(1.0 + xr ** 2)       # forward distance to wall, per column

    # Per-pixel surface classification.
    yr_col = yr[:, None]
    z_at_wall = ch - z_cam[None, :] * yr_col      # world z where the ray meets the wall plane
    wall_mask = (z_at_wall >= 0.0) & (z_at_wall <= wall_h)
    t_wall = z_cam[None, :] * n3
    with np.errstate(divide="ignore", invalid="ignore"):
        t_floor = np.where(yr_col > 0, ch * n3 / yr_col, np.inf)
        t_ceil = np.where(yr_col < 0, (ch - wall_h) * n3 / yr_col, np.inf)
    depth = np.where(wall_mask, t_wall, np.where(yr_col > 0, t_floor, t_ceil))
    depth = np.minimum(depth, max_range)

    rgb = np.empty((H, W, 3), dtype=np.uint8)
    rgb[:] = np.where(yr_col[..., None] > 0, np.array(FLOOR_COLOR, dtype=np.uint8),
                      np.array(CEILING_COLOR, dtype=np.uint8))
    shade = np.where(faces == 0, WALL_SHADE_X, WALL_SHADE_Y).astype(np.float64)
    fog = np.clip(1.0 - 0.6 * s_plan / max_range, 0.3, 1.0)
    wall_gray = (shade * fog).astype(np.uint8)
    rgb[wall_mask] = np.repeat(wall_gray[None, :], H, axis=0)[wall_mask, None]

    # Entity billboards, far to near, with per-pixel depth test.
    owner = np.full((H, W), -1, dtype=np.int64)
    ents = sorted(state.live_entities(), key=lambda e: (-e[3], e[0]))
    boxes: dict[int, tuple[float, float, float, float]] = {}
    meta: dict[int, tuple[EntityCategory, float, tuple[float, float]]] = {}
    for ent_id, cat, (ex, ey), dist in ents:
        rel = np.array([ex - agent.x, ey - agent.y])
        z_e = float(rel @ fwd)                    # forward distance to center
        if z_e <= 1e-6:
            continue
        x_e = float(rel @ right)
        r_e, h_e = p.entity_radius, p.entity_height
        u0 = camera.cx + camera.fx * (x_e - r_e) / z_e
        u1 = camera.cx + camera.fx * (x_e + r_e) / z_e
        v0 = camera.cy + camera.fy * (ch - h_e) / z_e
        v1 = camera.cy + camera.fy * ch / z_e     # ground line
        # Pixels whose center ray crosses the billboard rectangle.
        c0, c1 = max(int(np.ceil(u0)), 0), min(int(np.floor(u1)) + 1, W)
        r0, r1 = max(int(np.ceil(v0)), 0), min(int(np.floor(v1)) + 1, H)
        if c0 >= c1 or r0 >= r1:
            continue
        t_sprite = z_e * n3[r0:r1, c0:c1]
        closer = t_sprite < depth[r0:r1, c0:c1]
        if not closer.any():
            continue
        # Checker texture in sprite-local pixels keeps the hue classifiable.
        rr, cc = np.meshgrid(np.arange(r0, r1), np.arange(c0, c1), indexing="ij")
        factor = np.where(((rr // 2) + (cc // 2)) % 2 == 0, 1.0, 0.78)
        base = np.array(ENTITY_COLORS[cat], dtype=np.float64)
        tile = np.clip(factor[..., None] * base[None, None, :], 0, 255).astype(np.uint8)
        region = rgb[r0:r1, c0:c1]
        region[closer] = tile[closer]
        depth[r0:r1, c0:c1][closer] = t_sprite[closer]
        owner[r0:r1, c0:c1][closer] = ent_id
        boxes[ent_id] = (max(u0, 0.0), max(v0, 0.0), min(u1, float(W)), min(v1, float(H)))
        meta[ent_id] = (cat, float(np.hypot(*rel)), (ex, ey))

    visible = []
    for ent_id in np.unique(owner):
        if ent_id < 0:
            continue
        cat, dist, pos = meta[int(ent_id)]
        visible.append(VisibleEntity(category=cat, bbox=boxes[int(ent_id)],
                                     distance=dist, world_pos=pos,
                                     entity_id=int(ent_id)))
    visible.sort(key=lambda v: v.entity_id)
    return Observation(rgb=rgb, depth=depth, visible=visible)
