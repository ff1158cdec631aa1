"""The 13-action table, split into the three human-derived groups:
single keystrokes (move or shoot), two-keystroke move+shoot combos, and
weapon switching."""

from __future__ import annotations

from dataclasses import dataclass

N_ACTIONS = 13


@dataclass(frozen=True)
class ActionSpec:
    name: str
    group: str                    # "single" | "combo" | "switch"
    forward: bool = False
    backward: bool = False
    turn_left: bool = False
    turn_right: bool = False
    strafe_left: bool = False
    strafe_right: bool = False
    shoot: bool = False
    switch_weapon: bool = False


ACTION_TABLE: tuple[ActionSpec, ...] = (
    ActionSpec("forward", "single", forward=True),
    ActionSpec("backward", "single", backward=True),
    ActionSpec("turn_left", "single", turn_left=True),
    ActionSpec("turn_right", "single", turn_right=True),
    ActionSpec("strafe_left", "single", strafe_left=True),
    ActionSpec("strafe_right", "single", strafe_right=True),
    ActionSpec("shoot", "single", shoot=True),
    ActionSpec("forward_shoot", "combo", forward=True, shoot=True),
    ActionSpec("turn_left_shoot", "combo", turn_left=True, shoot=True),
    ActionSpec("turn_right_shoot", "combo", turn_right=True, shoot=True),
    ActionSpec("strafe_left_shoot", "combo", strafe_left=True, shoot=True),
    ActionSpec("strafe_right_shoot", "combo", strafe_right=True, shoot=True),
    ActionSpec("switch_weapon", "switch", switch_weapon=True),
)

assert len(ACTION_TABLE) == N_ACTIONS


def action_spec(action_id: int) -> ActionSpec:
    if not 0 <= action_id < N_ACTIONS:
        raise ValueError(f"action id {action_id} outside [0, {N_ACTIONS - 1}]")
    return ACTION_TABLE[action_id]
