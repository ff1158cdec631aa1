"""Gaussian position noise for the noisy-oracle map variants.

Offsets are sampled once per episode and held fixed within it, so a corrupted
map stays coherent frame to frame: each wall cell, each entity placement and
the agent get one 2D displacement for the whole episode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..arena.spec import EntityCategory


@dataclass(frozen=True)
class NoiseSpec:
    sigma_walls: float = 0.0          # world units
    sigma_entities: float = 0.0       # world units
    entities_include_agent: bool = True

    def __post_init__(self):
        if self.sigma_walls < 0 or self.sigma_entities < 0:
            raise ValueError("noise sigmas must be non-negative")

    @property
    def active(self) -> bool:
        return self.sigma_walls > 0 or self.sigma_entities > 0


@dataclass(frozen=True)
class MapTruth:
    """Ground-truth map inputs: wall positions, agent pose, object positions."""

    wall_positions: np.ndarray        # (N, 2) world
    agent_pose: tuple[float, float, float]
    entity_positions: np.ndarray      # (M, 2) world


class EpisodeNoise:
    """Per-episode displacement table."""

    def __init__(self, spec: NoiseSpec, n_walls: int, n_entities: int,
                 rng: np.random.Generator):
        self.spec = spec
        self._walls = (rng.normal(0.0, spec.sigma_walls, size=(n_walls, 2))
                       if spec.sigma_walls > 0 else np.zeros((n_walls, 2)))
        self._entities = (rng.normal(0.0, spec.sigma_entities, size=(n_entities, 2))
                          if spec.sigma_entities > 0 else np.zeros((n_entities, 2)))
        if spec.sigma_entities > 0 and spec.entities_include_agent:
            self._agent = rng.normal(0.0, spec.sigma_entities, size=2)
        else:
            self._agent = np.zeros(2)

    def wall_offset(self, cell_id: int) -> tuple[float, float]:
        if len(self._walls) == 0:
            return (0.0, 0.0)
        dx, dy = self._walls[cell_id % len(self._walls)]
        return (float(dx), float(dy))

    def entity_offset(self, index: int, cat: EntityCategory | None = None) -> tuple[float, float]:
        if len(self._entities) == 0:
            return (0.0, 0.0)
        dx, dy = self._entities[index % len(self._entities)]
        return (float(dx), float(dy))

    def agent_offset(self) -> tuple[float, float]:
        return (float(self._agent[0]), float(self._agent[1]))


def apply_noise(truth: MapTruth, spec: NoiseSpec,
                rng: np.random.Generator) -> MapTruth:
    """One-shot perturbation of ground-truth map inputs.

    Zero sigmas return the inputs unchanged (bit-identical arrays).
    """
    noise = EpisodeNoise(spec, len(truth.wall_positions), len(truth.entity_positions), rng)
    walls = truth.wall_positions + noise._walls
    entities = truth.entity_positions + noise._entities
    ax, ay, ah = truth.agent_pose
    dx, dy = noise.agent_offset()
    return MapTruth(wall_positions=walls,
                    agent_pose=(ax + dx, ay + dy, ah),
                    entity_positions=entities)
