"""Dual-background stationary-object detection.

Two models adapt at different speeds: a newly stopped object reaches the fast
background image first and the slow one much later, so the thresholded
difference of the two background images (BGDIFF) exposes exactly the
temporarily stationary content. No frame differencing or moving-pixel removal
is needed; moving objects never settle into either background.
"""

from __future__ import annotations

import numpy as np

from . import binary_ops
from .background import GaussianMixtureBackground, GmmParams, LearningRate
from .frames import GrayFrame
from .geometry import Rect
from .tracking import ObjectRegistry, TrackedObject


def validate_rate_pair(fast: LearningRate, slow: LearningRate) -> None:
    """The fast model must adapt strictly faster than the slow one."""
    if fast.alpha > slow.alpha:
        return
    if fast.alpha == slow.alpha and fast.update_stride < slow.update_stride:
        return
    raise ValueError(
        "fast rate must exceed slow rate: need alpha_fast > alpha_slow, or "
        "equal alphas with stride_fast < stride_slow "
        f"(got alpha {fast.alpha}/{slow.alpha}, stride "
        f"{fast.update_stride}/{slow.update_stride})"
    )


class DualBackgroundDetector:
    def __init__(
        self,
        width: int,
        height: int,
        gmm_params: GmmParams | None = None,
        fast_rate: LearningRate | None = None,
        slow_rate: LearningRate | None = None,
        tau_bgdiff: float = 25.0,
        morph_radius: int = 1,
        min_area: int | None = None,
        overlap_threshold: float = 0.8,
        overlap_mode: str = "min_area",
        miss_limit: int = 5,
        confirm_frames: int = 10,
    ):
        fast_rate = fast_rate or LearningRate(alpha=0.02)
        slow_rate = slow_rate or LearningRate(alpha=0.002)
        validate_rate_pair(fast_rate, slow_rate)
        self.fast = GaussianMixtureBackground(width, height, gmm_params, fast_rate)
        self.slow = GaussianMixtureBackground(width, height, gmm_params, slow_rate)
        self.tau_bgdiff = tau_bgdiff
        self.morph_radius = morph_radius
        self.min_area = min_area if min_area is not None else max(
            1, round(0.001 * width * height)
        )
        self.confirm_frames = confirm_frames
        self.registry = ObjectRegistry(overlap_threshold, miss_limit, overlap_mode)
        self.last_bgdiff: np.ndarray | None = None

    def step(
        self, frame: GrayFrame, prev_frame: GrayFrame | None = None
    ) -> list[TrackedObject]:
        """Process one frame; returns the current stationary candidates.

        prev_frame is accepted for interface parity with the single-background
        detector and ignored.
        """
        self.fast.update(frame)
        self.slow.update(frame)
        bgdiff = binary_ops.threshold_absdiff(
            self.fast.background_image(),
            self.slow.background_image(),
            self.tau_bgdiff,
        )
        bgdiff = binary_ops.dilate(
            binary_ops.erode(bgdiff, self.morph_radius), self.morph_radius
        )
        self.last_bgdiff = bgdiff
        blobs = binary_ops.label_components(bgdiff, self.min_area)
        self.registry.step(blobs, frame.frame_index)
        return self.registry.candidates(self.confirm_frames)

    def reset_region(self, bbox: Rect, frame: GrayFrame) -> None:
        self.fast.reset_region(bbox, frame)
        self.slow.reset_region(bbox, frame)
