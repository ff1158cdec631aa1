"""Game dynamics: movement, combat, pickups, monster behaviour, reward.

One logical step holds an action for 4 simulation ticks (frame skip), then
renders. Reward = delta_health/100 + kill_indicator. All randomness flows
through the per-game seeded generator stored in GameState, so identical
(spec, seed, actions) produce bit-identical traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..mapping.geometry import CameraIntrinsics, wrap_angle
from .actions import action_spec
from .render import Observation, line_of_sight, render
from .spec import ArenaSpec, EntityCategory, GameParams


class EpisodeDoneError(RuntimeError):
    """step() called on a finished episode."""


@dataclass
class AgentState:
    x: float
    y: float
    heading: float                # radians in [0, 2*pi)
    health: int = 100
    weapon_tier: str = "basic"    # "basic" | "high"
    has_high_weapon: bool = False
    ammo: int = 0
    alive: bool = True


@dataclass
class MonsterState:
    placement_id: int
    x: float
    y: float
    hp: int
    alive: bool = True
    respawn_timer: int = 0


@dataclass
class PickupState:
    placement_id: int
    category: EntityCategory
    x: float
    y: float
    active: bool = True
    respawn_timer: int = 0


@dataclass
class GameState:
    spec: ArenaSpec
    params: GameParams
    camera: CameraIntrinsics
    agent: AgentState
    monsters: list[MonsterState]
    pickups: list[PickupState]
    rng: np.random.Generator
    tick: int = 0
    done: bool = False
    last_events: tuple[int, int] = (0, 0)

    def live_entities(self):
        """(entity_id, category, (x, y), planar distance to agent) for drawable entities."""
        out = []
        for m in self.monsters:
            if m.alive:
                out.append((m.placement_id, EntityCategory.MONSTER, (m.x, m.y),
                            math.hypot(m.x - self.agent.x, m.y - self.agent.y)))
        for pk in self.pickups:
            if pk.active:
                out.append((pk.placement_id, pk.category, (pk.x, pk.y),
                            math.hypot(pk.x - self.agent.x, pk.y - self.agent.y)))
        return out

    def agent_pose(self) -> tuple[float, float, float]:
        return (self.agent.x, self.agent.y, self.agent.heading)


def default_camera(width: int = 84, height: int = 84, fov_deg: float = 90.0) -> CameraIntrinsics:
    return CameraIntrinsics.from_fov(fov_deg, width, height)


def reset(spec: ArenaSpec, seed: int,
          camera: CameraIntrinsics | None = None) -> tuple[GameState, Observation]:
    """Start an episode. Spawn choice is the first draw from default_rng(seed)."""
    camera = camera or default_camera()
    rng = np.random.default_rng(seed)
    spawn = spec.spawns[int(rng.integers(len(spec.spawns)))]
    sx, sy = spec.cell_center(*spawn.cell)
    agent = AgentState(x=sx, y=sy, heading=wrap_angle(spawn.heading))

    monsters, pickups = [], []
    for pid, (cat, (x, y)) in enumerate(spec.placements):
        if cat is EntityCategory.MONSTER:
            monsters.append(MonsterState(placement_id=pid, x=x, y=y, hp=spec.monster.hp))
        else:
            pickups.append(PickupState(placement_id=pid, category=cat, x=x, y=y))

    state = GameState(spec=spec, params=spec.params, camera=camera, agent=agent,
                      monsters=monsters, pickups=pickups, rng=rng)
    obs = render(state, camera)
    obs.events = (0, 0)
    state.last_events = (0, 0)
    return state, obs


def _try_move(spec: ArenaSpec, radius: float, x: float, y: float,
              dx: float, dy: float) -> tuple[float, float]:
    """Axis-separated slide: cancel an axis when its move would overlap a wall."""
    nx = x + dx
    if not _circle_blocked(spec, nx, y, radius):
        x = nx
    ny = y + dy
    if not _circle_blocked(spec, x, ny, radius):
        y = ny
    return x, y


def _circle_blocked(spec: ArenaSpec, x: float, y: float, radius: float) -> bool:
    cs = spec.cell_size
    ix0 = int(math.floor((x - radius) / cs))
    ix1 = int(math.floor((x + radius) / cs))
    iy0 = int(math.floor((y - radius) / cs))
    iy1 = int(math.floor((y + radius) / cs))
    for iy in range(iy0, iy1 + 1):
        for ix in range(ix0, ix1 + 1):
            if not spec.is_wall(ix, iy):
                continue
            # nearest point of the cell to the circle center
            cx = min(max(x, ix * cs), (ix + 1) * cs)
            cy = min(max(y, iy * cs), (iy + 1) * cs)
            if (cx - x) ** 2 + (cy - y) ** 2 < radius ** 2:
                return True
    return False


def _agent_shoot(state: GameState) -> int:
    """Hitscan along the heading; returns kills scored."""
    agent, spec, p = state.agent, state.spec, state.params
    damage = p.basic_damage
    if agent.weapon_tier == "high" and agent.ammo > 0:
        damage = p.high_damage
        agent.ammo -= 1

    dx, dy = math.cos(agent.heading), math.sin(agent.heading)
    wall_dist, _ = cast_rays_cached(spec, agent.x, agent.y, dx, dy)
    best, target = None, None
    for m in state.monsters:
        if not m.alive:
            continue
        rx, ry = m.x - agent.x, m.y - agent.y
        along = rx * dx + ry * dy
        if along <= 0:
            continue
        perp = abs(-rx * dy + ry * dx)
        if perp > spec.monster.radius:
            continue
        hit_dist = along - math.sqrt(max(spec.monster.radius ** 2 - perp ** 2, 0.0))
        if hit_dist < wall_dist and (best is None or hit_dist < best):
            best, target = hit_dist, m
    kills = 0
    if target is not None:
        target.hp -= damage
        if target.hp <= 0:
            target.alive = False
            target.respawn_timer = spec.monster.respawn_ticks
            kills = 1
    return kills


def cast_rays_cached(spec: ArenaSpec, x: float, y: float,
                     dx: float, dy: float) -> tuple[float, int]:
    from .render import cast_rays
    dist, face = cast_rays(spec.grid, spec.cell_size, x, y,
                           np.array([[dx, dy]]), max_range=spec.diagonal)
    return float(dist[0]), int(face[0])


def _monster_tick(state: GameState) -> None:
    spec, p, agent = state.spec, state.params, state.agent
    mp = spec.monster
    for m in state.monsters:
        if not m.alive:
            if m.respawn_timer > 0:
                m.respawn_timer -= 1
            if m.respawn_timer == 0:
                floors = spec.floor_cells()
                ix, iy = floors[int(state.rng.integers(len(floors)))]
                m.x, m.y = spec.cell_center(iy, ix)
                m.hp = mp.hp
                m.alive = True
            continue
        dist = math.hypot(agent.x - m.x, agent.y - m.y)
        if not line_of_sight(spec.grid, spec.cell_size, m.x, m.y, agent.x, agent.y):
            continue
        if dist <= mp.attack_range:
            agent.health = max(agent.health - mp.damage, 0)
        elif dist > 1e-9:
            step = min(mp.speed, dist)
            dx, dy = (agent.x - m.x) / dist * step, (agent.y - m.y) / dist * step
            m.x, m.y = _try_move(spec, mp.radius, m.x, m.y, dx, dy)


def _pickups_tick(state: GameState) -> None:
    agent, p = state.agent, state.params
    for pk in state.pickups:
        if not pk.active:
            if pk.respawn_timer > 0:
                pk.respawn_timer -= 1
                if pk.respawn_timer == 0:
                    pk.active = True
            continue
        if math.hypot(pk.x - agent.x, pk.y - agent.y) > p.pickup_radius:
            continue
        if pk.category is EntityCategory.HEALTH_PACK:
            if agent.health >= 100:
                continue              # full health: pack stays (Doom behaviour)
            agent.health = min(agent.health + p.health_per_pack, 100)
        elif pk.category is EntityCategory.HIGH_GRADE_WEAPON:
            agent.has_high_weapon = True
            agent.weapon_tier = "high"
            agent.ammo += p.ammo_per_pickup
        elif pk.category is EntityCategory.HIGH_GRADE_AMMO:
            agent.ammo += p.ammo_per_pickup
        elif pk.category is EntityCategory.OTHER_PICKUP:
            pass                      # scenery pickup: no mechanical effect
        pk.active = False
        pk.respawn_timer = state.params.pickup_respawn_ticks


def step(state: GameState, action: int) -> tuple[GameState, Observation, float, bool]:
    """Advance one logical step (4 ticks with the action held), then render."""
    if state.done:
        raise EpisodeDoneError("step() after episode end")
    act = action_spec(action)
    spec, p, agent = state.spec, state.params, state.agent

    health_before = agent.health
    kills = 0

    if act.switch_weapon and agent.has_high_weapon:
        agent.weapon_tier = "high" if agent.weapon_tier == "basic" else "basic"

    for tick in range(p.ticks_per_step):
        if act.turn_left:
            agent.heading = wrap_angle(agent.heading + p.turn_speed)
        if act.turn_right:
            agent.heading = wrap_angle(agent.heading - p.turn_speed)

        dx = dy = 0.0
        cos_h, sin_h = math.cos(agent.heading), math.sin(agent.heading)
        if act.forward:
            dx, dy = dx + cos_h, dy + sin_h
        if act.backward:
            dx, dy = dx - cos_h, dy - sin_h
        if act.strafe_left:
            dx, dy = dx - sin_h, dy + cos_h
        if act.strafe_right:
            dx, dy = dx + sin_h, dy - cos_h
        norm = math.hypot(dx, dy)
        if norm > 1e-12:
            agent.x, agent.y = _try_move(spec, p.agent_radius, agent.x, agent.y,
                                         dx / norm * p.move_speed, dy / norm * p.move_speed)

        if act.shoot and tick == 0:   # one shot per logical step
            kills += _agent_shoot(state)

        _monster_tick(state)
        _pickups_tick(state)
        state.tick += 1

    if agent.health <= 0:
        agent.alive = False
    dh = int(agent.health - health_before)
    dk = 1 if kills > 0 else 0
    state.done = (not agent.alive) or state.tick >= spec.episode_cap
    state.last_events = (dh, dk)

    obs = render(state, state.camera)
    obs.events = (dh, dk)
    reward = dh / 100.0 + dk
    return state, obs, reward, state.done
