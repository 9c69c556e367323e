"""Single-background stationary-object detection.

Per frame: update one background model, threshold the frame against its
background image, erase currently-moving pixels using the frame difference,
clean up with an erode/dilate pass, then track the remaining blobs by
rectangle overlap. Objects persisting long enough are stationary candidates.
"""

from __future__ import annotations

import numpy as np

from . import binary_ops
from .background import GaussianMixtureBackground, GmmParams, LearningRate
from .frames import GrayFrame
from .geometry import Rect
from .tracking import ObjectRegistry, TrackedObject


class SingleBackgroundDetector:
    def __init__(
        self,
        width: int,
        height: int,
        gmm_params: GmmParams | None = None,
        rate: LearningRate | None = None,
        tau: float = 25.0,
        tau_motion: float = 15.0,
        guard_radius: int = 2,
        morph_radius: int = 1,
        min_area: int | None = None,
        overlap_threshold: float = 0.8,
        overlap_mode: str = "min_area",
        miss_limit: int = 5,
        stop_threshold_frames: int = 50,
    ):
        self.model = GaussianMixtureBackground(
            width, height, gmm_params, rate or LearningRate(alpha=0.002)
        )
        self.tau = tau
        self.tau_motion = tau_motion
        self.guard_radius = guard_radius
        self.morph_radius = morph_radius
        # Default minimum blob area: 0.1% of the ROI area.
        self.min_area = min_area if min_area is not None else max(
            1, round(0.001 * width * height)
        )
        self.stop_threshold_frames = stop_threshold_frames
        self.registry = ObjectRegistry(overlap_threshold, miss_limit, overlap_mode)
        self.last_cleaned: np.ndarray | None = None

    def step(
        self, frame: GrayFrame, prev_frame: GrayFrame | None
    ) -> list[TrackedObject]:
        """Process one frame; returns the current stationary candidates."""
        self.model.update(frame)
        try:
            background = self.model.background_image()
        except RuntimeError:
            # Zero-rate model never initializes; nothing to subtract against.
            self.last_cleaned = np.zeros(frame.pixels.shape, dtype=bool)
            return []
        foreground = binary_ops.threshold_absdiff(frame.pixels, background, self.tau)
        if prev_frame is not None:
            motion = binary_ops.frame_difference(
                frame.pixels, prev_frame.pixels, self.tau_motion
            )
        else:
            motion = np.zeros_like(foreground)
        cleaned = binary_ops.remove_moving_pixels(foreground, motion, self.guard_radius)
        cleaned = binary_ops.dilate(
            binary_ops.erode(cleaned, self.morph_radius), self.morph_radius
        )
        self.last_cleaned = cleaned
        blobs = binary_ops.label_components(cleaned, self.min_area)
        self.registry.step(blobs, frame.frame_index)
        return self.registry.candidates(self.stop_threshold_frames)

    def reset_region(self, bbox: Rect, frame: GrayFrame) -> None:
        self.model.reset_region(bbox, frame)
