from .detector import CATEGORIES, Detection, DetectorConfig, detect, iou, measure_ap
from .tracker import (
    Keyframe,
    TrackerConfig,
    TrackerState,
    extract_scan,
    init_tracker,
    relocalize,
    scan_signature,
    scan_to_world,
    track,
)

__all__ = [
    "CATEGORIES", "Detection", "DetectorConfig", "detect", "iou", "measure_ap",
    "Keyframe", "TrackerConfig", "TrackerState", "extract_scan", "init_tracker",
    "relocalize", "scan_signature", "scan_to_world", "track",
]
