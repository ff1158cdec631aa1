from .geometry import (
    CameraIntrinsics,
    RigidTransform,
    VertexMap,
    backproject,
    camera_pose_transform,
    camera_to_world_axes,
    ray_depth_to_planar,
    to_global,
)
from .voxel import LABEL_STRUCTURE, VoxelHashGrid, fuse
from .topdown import (
    EncodingTable,
    MapAffine,
    SemanticMap2D,
    estimate_entity_world_pos,
    oracle_map,
    project_topdown,
)
from .noise import EpisodeNoise, MapTruth, NoiseSpec, apply_noise
from .export import save_color_png, save_gray_png

__all__ = [
    "CameraIntrinsics", "RigidTransform", "VertexMap", "backproject",
    "camera_pose_transform", "camera_to_world_axes", "ray_depth_to_planar",
    "to_global", "LABEL_STRUCTURE", "VoxelHashGrid", "fuse", "EncodingTable",
    "MapAffine", "SemanticMap2D", "estimate_entity_world_pos", "oracle_map",
    "project_topdown", "EpisodeNoise", "MapTruth", "NoiseSpec", "apply_noise",
    "save_color_png", "save_gray_png",
]
