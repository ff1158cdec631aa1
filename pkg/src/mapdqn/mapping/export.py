"""PNG export of semantic maps: exact gray values plus a colorized view."""

from __future__ import annotations

import numpy as np
from PIL import Image

from .topdown import EncodingTable, SemanticMap2D

# Inspection palette: monsters red, health purple, high-grade weapons violet,
# high-grade ammo blue, other pickups yellow, agent green, walls white.
_COLOR = {
    "walls": (255, 255, 255),
    "monster": (220, 40, 40),
    "health": (170, 40, 170),
    "high_weapon": (130, 70, 220),
    "high_ammo": (50, 90, 230),
    "other": (230, 210, 50),
    "agent_body": (40, 200, 40),
    "agent_tip": (120, 255, 120),
    "unknown": (0, 0, 0),
}


def save_gray_png(m: SemanticMap2D, path: str) -> None:
    Image.fromarray(m.image, mode="L").save(path)


def colorize(m: SemanticMap2D, enc: EncodingTable = EncodingTable()) -> np.ndarray:
    out = np.zeros(m.image.shape + (3,), dtype=np.uint8)
    for name, rgb in _COLOR.items():
        out[m.image == getattr(enc, name)] = rgb
    return out


def save_color_png(m: SemanticMap2D, path: str, enc: EncodingTable = EncodingTable()) -> None:
    Image.fromarray(colorize(m, enc), mode="RGB").save(path)
