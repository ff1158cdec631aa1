"""Sparse voxel storage: only observed cells are allocated.

Coordinates quantize as floor(coord / voxel_size); a cell record keeps a hit
count and per-label counts. Label 0 is structural geometry (walls, floor,
ceiling); labels 1..5 follow the EntityCategory order.
"""

from __future__ import annotations

import numpy as np

LABEL_STRUCTURE = 0
NUM_LABELS = 6


class VoxelHashGrid:
    def __init__(self, voxel_size: float):
        if voxel_size <= 0:
            raise ValueError(f"voxel size must be positive, got {voxel_size}")
        self.voxel_size = float(voxel_size)
        self.cells: dict[tuple[int, int, int], np.ndarray] = {}
        # cells[key] is a length NUM_LABELS+1 int64 array: [hits, label counts...]

    def __len__(self) -> int:
        return len(self.cells)

    def quantize(self, points: np.ndarray) -> np.ndarray:
        return np.floor(np.asarray(points, dtype=np.float64) / self.voxel_size).astype(np.int64)

    def hits(self, key: tuple[int, int, int]) -> int:
        rec = self.cells.get(key)
        return 0 if rec is None else int(rec[0])

    def label_counts(self, key: tuple[int, int, int]) -> np.ndarray:
        rec = self.cells.get(key)
        return np.zeros(NUM_LABELS, dtype=np.int64) if rec is None else rec[1:].copy()

    def occupied(self) -> np.ndarray:
        """(N, 3) integer coordinates of all stored voxels."""
        if not self.cells:
            return np.zeros((0, 3), dtype=np.int64)
        return np.array(list(self.cells.keys()), dtype=np.int64)

    def centers(self, keys: np.ndarray) -> np.ndarray:
        return (np.asarray(keys, dtype=np.float64) + 0.5) * self.voxel_size

    def band_voxels(self, z_low: float, z_high: float,
                    label: int | None = LABEL_STRUCTURE,
                    min_hits: int = 1) -> np.ndarray:
        """Voxels whose center z lies in [z_low, z_high], as (N, 3) int coords.

        With a label given, only voxels with at least one observation of that
        label qualify.
        """
        out = []
        for key, rec in self.cells.items():
            z = (key[2] + 0.5) * self.voxel_size
            if z < z_low or z > z_high or rec[0] < min_hits:
                continue
            if label is not None and rec[1 + label] == 0:
                continue
            out.append(key)
        if not out:
            return np.zeros((0, 3), dtype=np.int64)
        return np.array(out, dtype=np.int64)


def fuse(grid: VoxelHashGrid, points: np.ndarray,
         labels: np.ndarray | int = LABEL_STRUCTURE) -> VoxelHashGrid:
    """Accumulate labeled world points into the grid.

    Each point increments its quantized voxel's hit count and label count.
    Mutates and returns ``grid``.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.size == 0:
        return grid
    if points.ndim != 2 or points.shape[1] != 3:
        raise ValueError(f"expected (N, 3) points, got {points.shape}")
    labels = np.broadcast_to(np.asarray(labels, dtype=np.int64), (points.shape[0],))
    if labels.size and (labels.min() < 0 or labels.max() >= NUM_LABELS):
        raise ValueError("label out of range")

    idx = grid.quantize(points)
    order = np.lexsort((idx[:, 2], idx[:, 1], idx[:, 0]))
    idx, labels = idx[order], labels[order]
    uniq, start = np.unique(idx, axis=0, return_index=True)
    bounds = np.append(start, len(idx))
    for k, key in enumerate(map(tuple, uniq)):
        rec = grid.cells.get(key)
        if rec is None:
            rec = np.zeros(1 + NUM_LABELS, dtype=np.int64)
            grid.cells[key] = rec
        seg = labels[bounds[k]:bounds[k + 1]]
        rec[0] += len(seg)
        rec[1:] += np.bincount(seg, minlength=NUM_LABELS)
    return grid
