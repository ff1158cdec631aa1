"""Arena definition and the ASCII grid loader.

Grid legend: '#' wall, '.' floor, 'A' spawn, 'M' monster, 'H' health pack,
'W' high-grade weapon, 'U' high-grade ammo, 'O' other pickup. Entity letters
also count as floor.

World coordinates: cell (row, col) of the text file maps to the square
[col, col+1) x [n_rows-1-row, n_rows-row) * cell_size, i.e. the top text row
sits at the largest y so printed arenas and north-up maps agree. The wall
grid is stored bottom-up: grid[iy, ix] with iy = floor(y / cell_size).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np


class ArenaError(ValueError):
    """Raised for malformed arena documents, with text row/column context."""


class EntityCategory(Enum):
    MONSTER = "monster"
    HEALTH_PACK = "health_pack"
    HIGH_GRADE_WEAPON = "high_grade_weapon"
    HIGH_GRADE_AMMO = "high_grade_ammo"
    OTHER_PICKUP = "other_pickup"


ENTITY_LEGEND = {
    "M": EntityCategory.MONSTER,
    "H": EntityCategory.HEALTH_PACK,
    "W": EntityCategory.HIGH_GRADE_WEAPON,
    "U": EntityCategory.HIGH_GRADE_AMMO,
    "O": EntityCategory.OTHER_PICKUP,
}

LEGEND = set("#.A") | set(ENTITY_LEGEND)


@dataclass(frozen=True)
class MonsterParams:
    speed: float = 0.04            # world units per tick
    attack_range: float = 1.0     # world units
    damage: int = 2               # health points per tick while in range
    respawn_ticks: int = 200
    hp: int = 100
    radius: float = 0.3


@dataclass(frozen=True)
class GameParams:
    """Dynamics constants not fixed by the arena file; all configurable."""

    move_speed: float = 0.08      # world units per tick
    turn_speed: float = 0.06      # radians per tick
    agent_radius: float = 0.25
    basic_damage: int = 34
    high_damage: int = 100
    health_per_pack: int = 25
    ammo_per_pickup: int = 8
    pickup_radius: float = 0.4
    pickup_respawn_ticks: int = 500
    entity_radius: float = 0.28
    entity_height: float = 0.7
    wall_height: float = 1.0
    camera_height: float = 0.5
    ticks_per_step: int = 4


@dataclass(frozen=True)
class SpawnPoint:
    cell: tuple[int, int]         # (iy, ix) in the bottom-up grid
    heading: float = 0.0


@dataclass(frozen=True)
class ArenaSpec:
    grid: np.ndarray              # (n_rows, n_cols) bool, True = wall, bottom-up rows
    cell_size: float
    spawns: tuple[SpawnPoint, ...]
    placements: tuple[tuple[EntityCategory, tuple[float, float]], ...]
    monster: MonsterParams = MonsterParams()
    episode_cap: int = 2100       # ticks
    params: GameParams = GameParams()

    def __post_init__(self):
        if self.cell_size <= 0:
            raise ArenaError(f"cell size must be positive, got {self.cell_size}")
        if self.episode_cap <= 0:
            raise ArenaError(f"episode cap must be positive, got {self.episode_cap}")

    @property
    def n_rows(self) -> int:
        return self.grid.shape[0]

    @property
    def n_cols(self) -> int:
        return self.grid.shape[1]

    @property
    def extent(self) -> tuple[float, float]:
        """(width, height) of the arena in world units."""
        return self.n_cols * self.cell_size, self.n_rows * self.cell_size

    @property
    def diagonal(self) -> float:
        w, h = self.extent
        return float(np.hypot(w, h))

    def window(self) -> tuple[float, float, float, float]:
        """World rectangle (xmin, ymin, xmax, ymax) covering the arena."""
        w, h = self.extent
        return (0.0, 0.0, w, h)

    def is_wall(self, ix: int, iy: int) -> bool:
        if ix < 0 or iy < 0 or ix >= self.n_cols or iy >= self.n_rows:
            return True
        return bool(self.grid[iy, ix])

    def is_wall_at(self, x: float, y: float) -> bool:
        return self.is_wall(int(np.floor(x / self.cell_size)),
                            int(np.floor(y / self.cell_size)))

    def cell_center(self, iy: int, ix: int) -> tuple[float, float]:
        return ((ix + 0.5) * self.cell_size, (iy + 0.5) * self.cell_size)

    def wall_cells(self) -> np.ndarray:
        """(N, 2) integer (ix, iy) coordinates of all wall cells."""
        iy, ix = np.nonzero(self.grid)
        return np.stack([ix, iy], axis=1)

    def floor_cells(self) -> np.ndarray:
        iy, ix = np.nonzero(~self.grid)
        return np.stack([ix, iy], axis=1)

    def with_params(self, monster: MonsterParams | None = None,
                    episode_cap: int | None = None,
                    params: GameParams | None = None) -> "ArenaSpec":
        return replace(self,
                       monster=monster or self.monster,
                       episode_cap=episode_cap or self.episode_cap,
                       params=params or self.params)


def load_arena(text: str, cell_size: float = 1.0,
               monster: MonsterParams = MonsterParams(),
               episode_cap: int = 2100,
               params: GameParams = GameParams()) -> ArenaSpec:
    """Parse an ASCII grid document into an ArenaSpec.

    Errors carry 1-based text row/column positions.
    """
    rows = [line for line in text.splitlines() if line.strip() != ""]
    if not rows:
        raise ArenaError("empty arena document")
    width = len(rows[0])
    for r, line in enumerate(rows):
        if len(line) != width:
            raise ArenaError(f"non-rectangular grid: row {r + 1} has {len(line)} "
                             f"characters, expected {width}")
    n_rows = len(rows)

    grid = np.zeros((n_rows, width), dtype=bool)
    spawns: list[SpawnPoint] = []
    placements: list[tuple[EntityCategory, tuple[float, float]]] = []

    for r, line in enumerate(rows):
        iy = n_rows - 1 - r          # bottom-up row index
        for c, ch in enumerate(line):
            if ch not in LEGEND:
                raise ArenaError(f"unknown character {ch!r} at row {r + 1}, column {c + 1}")
            if ch == "#":
                grid[iy, c] = True
                continue
            x, y = (c + 0.5) * cell_size, (iy + 0.5) * cell_size
            if ch == "A":
                spawns.append(SpawnPoint(cell=(iy, c)))
            elif ch in ENTITY_LEGEND:
                placements.append((ENTITY_LEGEND[ch], (x, y)))

    for c in range(width):
        if not grid[0, c]:
            raise ArenaError(f"unclosed boundary at row {n_rows}, column {c + 1}")
        if not grid[n_rows - 1, c]:
            raise ArenaError(f"unclosed boundary at row 1, column {c + 1}")
    for iy in range(n_rows):
        r = n_rows - 1 - iy
        if not grid[iy, 0]:
            raise ArenaError(f"unclosed boundary at row {r + 1}, column 1")
        if not grid[iy, width - 1]:
            raise ArenaError(f"unclosed boundary at row {r + 1}, column {width}")

    if not spawns:
        raise ArenaError("no spawn point ('A') in arena")

    return ArenaSpec(grid=grid, cell_size=cell_size, spawns=tuple(spawns),
                     placements=tuple(placements), monster=monster,
                     episode_cap=episode_cap, params=params)


def load_arena_file(path: str, **kwargs) -> ArenaSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return load_arena(fh.read(), **kwargs)
