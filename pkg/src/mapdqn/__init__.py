"""Map-augmented deep Q-learning on a raycast combat arena.

Subpackages:
    arena       -- deterministic first-person grid-arena simulator
    mapping     -- back-projection, rigid transforms, voxel fusion, top-down maps
    perception  -- object-detection emulator and depth-scan pose tracker
    qlearn      -- from-scratch convolutional Q-network, replay, RMSProp
    harness     -- experiment variants, training/evaluation, reports, CLI
"""

__version__ = "0.1.0"
