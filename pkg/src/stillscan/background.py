"""Per-pixel adaptive Gaussian-mixture background model.

The update rule is the classic adaptive mixture: the best-matching component
(observation within ``match_sigmas`` standard deviations of its mean) is pulled
toward the observation at the learning rate, all weights decay toward the match
indicator, and pixels with no matching component overwrite their weakest
component with a fresh one centered at the observation. A pixel is foreground
when nothing in the top-weight component set covering ``background_fraction``
of total weight matches it.

Two models run at different learning rates (or update strides) realize the
fast/slow background pair used by the dual-background detector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import GrayFrame
from .geometry import Rect


@dataclass(frozen=True)
class GmmParams:
    """Mixture-model parameters shared by every pixel."""

    components: int = 3
    match_sigmas: float = 2.5
    background_fraction: float = 0.7
    initial_variance: float = 225.0
    variance_floor: float = 4.0

    def __post_init__(self):
        if self.components < 1:
            raise ValueError("components must be >= 1")
        if self.match_sigmas <= 0:
            raise ValueError("match_sigmas must be positive")
        if not 0 < self.background_fraction <= 1:
            raise ValueError("background_fraction must be in (0, 1]")
        if self.initial_variance <= 0 or self.variance_floor <= 0:
            raise ValueError("variances must be positive")
        if self.variance_floor > self.initial_variance:
            raise ValueError("variance_floor cannot exceed initial_variance")


@dataclass(frozen=True)
class LearningRate:
    """Adaptation speed: per-update blend factor plus an optional frame stride."""

    alpha: float
    update_stride: int = 1

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.update_stride < 1:
            raise ValueError(f"update_stride must be >= 1, got {self.update_stride}")


class GaussianMixtureBackground:
    """Mixture-of-Gaussians background model for one frame geometry.

    A model instance is owned by one pipeline; `update` mutates it in place
    and returns the foreground mask evaluated against the pre-update state.
    """

    def __init__(self, width: int, height: int, params: GmmParams | None = None,
                 rate: LearningRate | None = None):
        self.params = params or GmmParams()
        self.rate = rate or LearningRate(alpha=0.002)
        self.width = width
        self.height = height
        k = self.params.components
        self.weights = np.zeros((k, height, width))
        self.means = np.zeros((k, height, width))
        self.variances = np.full((k, height, width), self.params.initial_variance)
        self._initialized = False
        self._comp_index = np.arange(k)[:, None, None]

    def update(self, frame: GrayFrame) -> np.ndarray:
        """Fold one frame into the model; returns the foreground mask.

        The mask is computed against the model as it stood on entry, so a
        zero learning rate or an off-stride frame classifies against a frozen
        model and leaves it untouched.
        """
        if frame.pixels.shape != (self.height, self.width):
            raise ValueError(
                f"frame is {frame.width}x{frame.height}, model is "
                f"{self.width}x{self.height}"
            )
        x = frame.pixels.astype(np.float64)
        matched = self._matches(x)
        initializing = not self._initialized
        foreground = self._classify(matched)
        if self.rate.alpha > 0 and frame.frame_index % self.rate.update_stride == 0:
            self._apply_update(x, matched)
            self._initialized = True
        if initializing and self._initialized:
            # First applied update only seeds the model; nothing is foreground
            # against an empty mixture.
            foreground = np.zeros_like(foreground)
        return foreground

    def background_image(self) -> np.ndarray:
        """Rounded mean of each pixel's highest-weight component."""
        if not self._initialized:
            raise RuntimeError("background model has not been updated yet")
        top = np.argmax(self.weights, axis=0)
        image = np.take_along_axis(self.means, top[None], axis=0)[0]
        return np.clip(np.rint(image), 0, 255).astype(np.uint8)

    def reset_region(self, bbox: Rect, frame: GrayFrame) -> None:
        """Re-seed the mixtures inside bbox from the current frame.

        Used after a monitored object departs so the vacated area does not
        linger in the model and spawn ghost detections.
        """
        clipped = bbox.clip(self.width, self.height)
        if clipped is None:
            return
        ys = slice(clipped.y, clipped.y2)
        xs = slice(clipped.x, clipped.x2)
        self.weights[:, ys, xs] = 0.0
        self.weights[0, ys, xs] = 1.0
        self.means[:, ys, xs] = 0.0
        self.means[0, ys, xs] = frame.pixels[ys, xs].astype(np.float64)
        self.variances[:, ys, xs] = self.params.initial_variance

    def _matches(self, x: np.ndarray) -> np.ndarray:
        """Per-component boolean match: active and within match_sigmas of mean."""
        active = self.weights > 0.0
        sigma = np.sqrt(self.variances)
        return active & (np.abs(x[None] - self.means) <= self.params.match_sigmas * sigma)

    def _classify(self, matched: np.ndarray) -> np.ndarray:
        """Foreground mask: no match inside the background component set.

        The background set of a pixel is the smallest prefix of its components,
        sorted by descending weight, whose cumulative weight reaches
        background_fraction.
        """
        order = np.argsort(-self.weights, axis=0, kind="stable")
        w_sorted = np.take_along_axis(self.weights, order, axis=0)
        cum_before = np.cumsum(w_sorted, axis=0) - w_sorted
        in_set_sorted = (cum_before < self.params.background_fraction) & (w_sorted > 0)
        in_set = np.empty_like(in_set_sorted)
        np.put_along_axis(in_set, order, in_set_sorted, axis=0)
        return ~(matched & in_set).any(axis=0)

    def _apply_update(self, x: np.ndarray, matched: np.ndarray) -> None:
        p = self.params
        alpha = self.rate.alpha
        has_match = matched.any(axis=0)
        # Best match: largest weight/sigma among matching components.
        score = np.where(matched, self.weights / np.sqrt(self.variances), -np.inf)
        best = (self._comp_index == score.argmax(axis=0)[None]) & has_match[None]

        w = np.where(has_match[None],
                     (1.0 - alpha) * self.weights + alpha * best,
                     self.weights)
        means = np.where(best, (1.0 - alpha) * self.means + alpha * x[None], self.means)
        variances = np.where(
            best,
            (1.0 - alpha) * self.variances + alpha * (x[None] - means) ** 2,
            self.variances,
        )

        # Pixels with no match overwrite their weakest component.
        replace = (self._comp_index == self.weights.argmin(axis=0)[None]) & ~has_match[None]
        w = np.where(replace, alpha, w)
        means = np.where(replace, x[None], means)
        variances = np.where(replace, p.initial_variance, variances)

        self.weights = w / w.sum(axis=0)
        self.means = means
        self.variances = np.maximum(variances, p.variance_floor)
