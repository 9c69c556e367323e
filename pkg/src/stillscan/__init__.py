"""stillscan: stationary-object detection in grayscale video.

Two detection schemes over the same tracking and event machinery: a single
adaptive background with moving-pixel removal, and a fast/slow background
pair whose difference image isolates newly stopped objects. Confirmed parked
objects are then monitored by normalized cross-correlation against a
registered reference patch.
"""

from .background import GaussianMixtureBackground, GmmParams, LearningRate
from .binary_ops import (
    Blob,
    dilate,
    erode,
    frame_difference,
    label_components,
    remove_moving_pixels,
    threshold_absdiff,
)
from .config import ConfigError, RunConfig, load_config, validate_config
from .dual_bg import DualBackgroundDetector
from .events import EventEngine, IncidentEvent, RunSummary
from .frames import GrayFrame, extract_roi, open_frame_source
from .geometry import Rect
from .ncc import StationaryObjectMonitor, ncc, occlusion_guard
from .pipeline import PipelineRunner, RunResult, bench, run, run_frames
from .single_bg import SingleBackgroundDetector
from .synth import SceneScript, load_script, parse_script, render
from .tracking import ObjectRegistry, TrackedObject, rect_overlap

__version__ = "0.1.0"

__all__ = [
    "Blob",
    "ConfigError",
    "DualBackgroundDetector",
    "EventEngine",
    "GaussianMixtureBackground",
    "GmmParams",
    "GrayFrame",
    "IncidentEvent",
    "LearningRate",
    "ObjectRegistry",
    "PipelineRunner",
    "Rect",
    "RunConfig",
    "RunResult",
    "RunSummary",
    "SceneScript",
    "SingleBackgroundDetector",
    "StationaryObjectMonitor",
    "TrackedObject",
    "bench",
    "dilate",
    "erode",
    "extract_roi",
    "frame_difference",
    "label_components",
    "load_config",
    "load_script",
    "ncc",
    "occlusion_guard",
    "open_frame_source",
    "parse_script",
    "rect_overlap",
    "remove_moving_pixels",
    "render",
    "run",
    "run_frames",
    "threshold_absdiff",
    "validate_config",
    "__version__",
]
