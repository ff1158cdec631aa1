"""Planar pose tracking from depth scans.

Same control structure as a feature-based tracker -- constant-velocity
prediction, local matching, RANSAC with least-squares refinement, keyframes,
signature-based global relocalization -- but the measurements are 2D points
back-projected from the object-masked center row of the depth buffer.

Poses are RigidTransform instances whose angle is the agent heading and whose
translation is (x, y, camera_height); the planar camera-to-world point map is
p_world = R(heading - pi/2) @ p_scan + (x, y) for scan points (right, forward).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace as dc_replace

import numpy as np

from ..mapping.geometry import CameraIntrinsics, RigidTransform, angle_diff, wrap_angle


@dataclass(frozen=True)
class TrackerConfig:
    keyframe_trans: float = 1.0          # world units between keyframes
    keyframe_rot: float = math.radians(30.0)
    inlier_threshold: float = 0.1        # world units
    lost_ratio: float = 0.3              # inlier ratio below which tracking is lost
    match_window: float = 0.5            # association radius during tracking
    reloc_window: float = 1.5            # association radius during relocalization
    reloc_accept_ratio: float = 0.6
    reloc_top_k: int = 5
    ransac_iters: int = 60
    min_points: int = 10
    signature_bins: int = 16


@dataclass
class Keyframe:
    pose: RigidTransform
    scan: np.ndarray                     # (W,) masked depth row (nan = object pixel)
    signature: np.ndarray                # coarse histogram of the scan
    points_world: np.ndarray             # (M, 2) cached world points


@dataclass
class TrackerState:
    pose: RigidTransform
    velocity: RigidTransform             # previous relative motion (per call)
    keyframes: list[Keyframe]
    lost: bool = False
    frames_since_keyframe: int = 0
    config: TrackerConfig = TrackerConfig()
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))


def scan_signature(scan: np.ndarray, bins: int, max_range: float) -> np.ndarray:
    """Normalized depth histogram used for keyframe retrieval."""
    valid = scan[np.isfinite(scan)]
    if valid.size == 0:
        return np.zeros(bins)
    hist, _ = np.histogram(valid, bins=bins, range=(0.0, max_range))
    return hist / valid.size


def extract_scan(depth: np.ndarray, object_mask: np.ndarray | None,
                 K: CameraIntrinsics) -> tuple[np.ndarray, np.ndarray]:
    """Masked center-row depth scan and its planar camera-frame points.

    Returns (scan, points) where scan is the (W,) ray-depth row with object
    pixels set to nan, and points is (M, 2) (right, forward) coordinates.
    """
    row = K.height // 2
    scan = depth[row].astype(np.float64).copy()
    if object_mask is not None:
        scan[object_mask[row]] = np.nan
    xr, yr = K.pixel_dirs()
    norm = np.sqrt(1.0 + xr ** 2 + yr[row] ** 2)
    z = scan / norm                      # planar forward depth
    pts = np.stack([z * xr, z], axis=1)
    return scan, pts[np.isfinite(z)]


def _pose_xy_heading(T: RigidTransform) -> tuple[float, float, float]:
    return (T.tx, T.ty, T.angle)


def scan_to_world(points: np.ndarray, pose: RigidTransform) -> np.ndarray:
    """Planar camera points (right, forward) -> world (x, y) under ``pose``."""
    x, y, h = _pose_xy_heading(pose)
    c, s = math.cos(h - math.pi / 2), math.sin(h - math.pi / 2)
    R = np.array([[c, -s], [s, c]])
    return points @ R.T + np.array([x, y])


def _rigid_from_pairs(src: np.ndarray, dst: np.ndarray) -> tuple[float, np.ndarray]:
    """Least-squares planar rotation+translation mapping src -> dst (2D Kabsch)."""
    sc, dc = src.mean(axis=0), dst.mean(axis=0)
    a, b = src - sc, dst - dc
    sxx = float(np.sum(a[:, 0] * b[:, 0]) + np.sum(a[:, 1] * b[:, 1]))
    sxy = float(np.sum(a[:, 0] * b[:, 1]) - np.sum(a[:, 1] * b[:, 0]))
    theta = math.atan2(sxy, sxx)
    c, s = math.cos(theta), math.sin(theta)
    R = np.array([[c, -s], [s, c]])
    t = dc - R @ sc
    return theta, t


def _apply_planar(theta: float, t: np.ndarray, pts: np.ndarray) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return pts @ np.array([[c, s], [-s, c]]) + t   # (R @ p.T).T


def _associate(cur: np.ndarray, ref: np.ndarray, window: float) -> tuple[np.ndarray, np.ndarray]:
    """Nearest reference point per current point within ``window``."""
    d2 = np.sum((cur[:, None, :] - ref[None, :, :]) ** 2, axis=2)
    j = np.argmin(d2, axis=1)
    ok = d2[np.arange(len(cur)), j] <= window ** 2
    return np.nonzero(ok)[0], j[ok]


def _align(points_cam: np.ndarray, ref_world: np.ndarray, init: RigidTransform,
           cfg: TrackerConfig, window: float, rng: np.random.Generator,
           refine_rounds: int = 2) -> tuple[RigidTransform, float]:
    """Estimate the pose aligning scan points to reference world points.

    RANSAC over associated pairs with least-squares refinement on inliers;
    re-associates ``refine_rounds`` times. Returns (pose, inlier_ratio), with
    inlier ratio relative to the scan size.
    """
    n = len(points_cam)
    if n < cfg.min_points or len(ref_world) < cfg.min_points:
        return init, 0.0
    pose = init
    ratio = 0.0
    for round_no in range(refine_rounds):
        cur_world = scan_to_world(points_cam, pose)
        ci, ri = _associate(cur_world, ref_world, window)
        if len(ci) < cfg.min_points:
            return init, 0.0
        src, dst = cur_world[ci], ref_world[ri]

        best_inl: np.ndarray | None = None
        for _ in range(cfg.ransac_iters):
            pick = rng.choice(len(src), size=2, replace=False)
            p0, p1 = src[pick[0]], src[pick[1]]
            q0, q1 = dst[pick[0]], dst[pick[1]]
            va, vb = p1 - p0, q1 - q0
            na, nb = np.hypot(*va), np.hypot(*vb)
            if na < 1e-9 or nb < 1e-9 or abs(na - nb) > cfg.inlier_threshold:
                continue
            theta = math.atan2(vb[1], vb[0]) - math.atan2(va[1], va[0])
            t = q0 - _apply_planar(theta, np.zeros(2), p0[None, :])[0]
            resid = np.linalg.norm(_apply_planar(theta, t, src) - dst, axis=1)
            inl = resid < cfg.inlier_threshold
            if best_inl is None or inl.sum() > best_inl.sum():
                best_inl = inl
        if best_inl is None or best_inl.sum() < cfg.min_points:
            return init, 0.0
        theta, t = _rigid_from_pairs(src[best_inl], dst[best_inl])
        resid = np.linalg.norm(_apply_planar(theta, t, src) - dst, axis=1)
        inliers = resid < cfg.inlier_threshold
        if inliers.sum() < cfg.min_points:
            return init, 0.0
        theta, t = _rigid_from_pairs(src[inliers], dst[inliers])
        # World-frame correction composed onto the current pose estimate.
        x, y, h = _pose_xy_heading(pose)
        c, s = math.cos(theta), math.sin(theta)
        nx, ny = c * x - s * y + t[0], s * x + c * y + t[1]
        pose = RigidTransform(angle=wrap_angle(h + theta), tx=nx, ty=ny, tz=pose.tz)
        ratio = float(inliers.sum()) / n
    return pose, ratio


def init_tracker(initial_pose: RigidTransform, depth: np.ndarray,
                 object_mask: np.ndarray | None, K: CameraIntrinsics,
                 max_range: float, config: TrackerConfig = TrackerConfig(),
                 seed: int = 0) -> TrackerState:
    """Anchor the tracker at an initial pose and store the first keyframe."""
    state = TrackerState(pose=initial_pose, velocity=RigidTransform.identity(),
                         keyframes=[], config=config,
                         rng=np.random.default_rng(seed))
    _insert_keyframe(state, depth, object_mask, K, max_range)
    return state


def _insert_keyframe(state: TrackerState, depth: np.ndarray,
                     object_mask: np.ndarray | None, K: CameraIntrinsics,
                     max_range: float) -> None:
    scan, pts = extract_scan(depth, object_mask, K)
    state.keyframes.append(Keyframe(
        pose=state.pose, scan=scan,
        signature=scan_signature(scan, state.config.signature_bins, max_range),
        points_world=scan_to_world(pts, state.pose)))
    state.frames_since_keyframe = 0


def track(state: TrackerState, depth: np.ndarray, object_mask: np.ndarray | None,
          K: CameraIntrinsics, max_range: float) -> tuple[TrackerState, RigidTransform, float]:
    """One tracking update. Returns (state, pose, confidence).

    A failed match flags the state lost and leaves the pose unchanged; it does
    not raise.
    """
    if state.lost:
        return state, state.pose, 0.0
    if not state.keyframes:
        raise ValueError("tracker not initialized")
    cfg = state.config
    predicted = state.pose.compose(state.velocity)
    _, pts = extract_scan(depth, object_mask, K)
    ref = state.keyframes[-1].points_world
    pose, ratio = _align(pts, ref, predicted, cfg, cfg.match_window, state.rng)
    if ratio < cfg.lost_ratio:
        state.lost = True
        state.velocity = RigidTransform.identity()
        return state, state.pose, ratio

    state.velocity = state.pose.inverse().compose(pose)
    state.pose = pose
    state.frames_since_keyframe += 1
    kf = state.keyframes[-1]
    trans = math.hypot(pose.tx - kf.pose.tx, pose.ty - kf.pose.ty)
    rot = abs(angle_diff(pose.angle, kf.pose.angle))
    if trans > cfg.keyframe_trans or rot > cfg.keyframe_rot:
        _insert_keyframe(state, depth, object_mask, K, max_range)
    return state, pose, ratio


def relocalize(state: TrackerState, depth: np.ndarray, object_mask: np.ndarray | None,
               K: CameraIntrinsics, max_range: float) -> tuple[TrackerState, RigidTransform | None]:
    """Global relocalization against the keyframe database.

    Ranks keyframes by signature distance, then attempts alignment against the
    top candidates over a fan of heading offsets. Returns (state, pose) with
    pose None when still lost.
    """
    if not state.keyframes:
        return state, None
    cfg = state.config
    scan, pts = extract_scan(depth, object_mask, K)
    if len(pts) < cfg.min_points:
        return state, None
    sig = scan_signature(scan, cfg.signature_bins, max_range)
    dists = [float(np.abs(kf.signature - sig).sum()) for kf in state.keyframes]
    order = np.argsort(dists)[:cfg.reloc_top_k]

    offsets = sorted(np.radians((0.0, 10.0, -10.0, 20.0, -20.0, 30.0, -30.0)), key=abs)
    best: tuple[float, RigidTransform] | None = None
    for idx in order:
        kf = state.keyframes[idx]
        for dth in offsets:
            init = dc_replace(kf.pose, angle=wrap_angle(kf.pose.angle + dth))
            pose, ratio = _align(pts, kf.points_world, init, cfg,
                                 cfg.reloc_window, state.rng, refine_rounds=3)
            if ratio >= cfg.reloc_accept_ratio and (best is None or ratio > best[0]):
                best = (ratio, pose)
    if best is None:
        return state, None
    state.pose = best[1]
    state.velocity = RigidTransform.identity()
    state.lost = False
    state.frames_since_keyframe = 0
    return state, best[1]
