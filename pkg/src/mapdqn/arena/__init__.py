from .spec import (
    ArenaError,
    ArenaSpec,
    EntityCategory,
    GameParams,
    MonsterParams,
    SpawnPoint,
    load_arena,
    load_arena_file,
)
from .actions import ACTION_TABLE, N_ACTIONS, ActionSpec, action_spec
from .game import (
    AgentState,
    EpisodeDoneError,
    GameState,
    MonsterState,
    PickupState,
    default_camera,
    reset,
    step,
)
from .render import ENTITY_COLORS, Observation, VisibleEntity, cast_rays, line_of_sight, render

__all__ = [
    "ArenaError", "ArenaSpec", "EntityCategory", "GameParams", "MonsterParams",
    "SpawnPoint", "load_arena", "load_arena_file", "ACTION_TABLE", "N_ACTIONS",
    "ActionSpec", "action_spec", "AgentState", "EpisodeDoneError", "GameState",
    "MonsterState", "PickupState", "default_camera", "reset", "step",
    "ENTITY_COLORS", "Observation", "VisibleEntity", "cast_rays",
    "line_of_sight", "render",
]
