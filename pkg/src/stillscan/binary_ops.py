"""Binary-mask operations: thresholded differencing, morphology, moving-pixel
removal and connected-component labeling.

Masks are 2-D boolean arrays. Morphology uses square structuring elements with
out-of-bounds neighbors treated as background.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .geometry import Rect

# 8-connectivity for component labeling.
_CONN8 = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class Blob:
    """A labeled connected component with its tight bounding box."""

    label: int
    bbox: Rect
    area: int


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def threshold_absdiff(a: np.ndarray, b: np.ndarray, tau: float) -> np.ndarray:
    """Mask of pixels where |a - b| strictly exceeds tau."""
    _check_same_shape(a, b)
    diff = np.abs(a.astype(np.int16) - b.astype(np.int16))
    return diff > tau


def frame_difference(curr: np.ndarray, prev: np.ndarray, tau_motion: float) -> np.ndarray:
    """Motion mask from consecutive frames: |curr - prev| > tau_motion."""
    return threshold_absdiff(curr, prev, tau_motion)


def _square(radius: int) -> np.ndarray:
    if radius < 1:
        raise ValueError(f"structuring element radius must be >= 1, got {radius}")
    return np.ones((2 * radius + 1, 2 * radius + 1), dtype=bool)


def erode(mask: np.ndarray, radius: int = 1) -> np.ndarray:
    return ndimage.binary_erosion(mask, structure=_square(radius), border_value=0)


def dilate(mask: np.ndarray, radius: int = 1) -> np.ndarray:
    return ndimage.binary_dilation(mask, structure=_square(radius), border_value=0)


def remove_moving_pixels(
    foreground: np.ndarray, motion: np.ndarray, guard_radius: int = 2
) -> np.ndarray:
    """Clear foreground bits lying within guard_radius of any motion pixel."""
    _check_same_shape(foreground, motion)
    if guard_radius < 0:
        raise ValueError(f"guard_radius must be >= 0, got {guard_radius}")
    halo = dilate(motion, guard_radius) if guard_radius > 0 else motion
    return foreground & ~halo


def label_components(mask: np.ndarray, min_area: int = 0) -> list[Blob]:
    """8-connected components of the mask, smallest-area ones dropped.

    Blobs are ordered by (bbox.y, bbox.x) and relabeled densely from 1.
    """
    labeled, count = ndimage.label(mask, structure=_CONN8)
    if count == 0:
        return []
    areas = np.bincount(labeled.ravel())
    slices = ndimage.find_objects(labeled)
    blobs = []
    for raw_label, sl in enumerate(slices, start=1):
        area = int(areas[raw_label])
        if area < min_area:
            continue
        ys, xs = sl
        bbox = Rect(int(xs.start), int(ys.start),
                    int(xs.stop - xs.start), int(ys.stop - ys.start))
        blobs.append((bbox, area))
    blobs.sort(key=lambda item: (item[0].y, item[0].x, item[0].w, item[0].h))
    return [Blob(i, bbox, area) for i, (bbox, area) in enumerate(blobs, start=1)]


def labeled_array(mask: np.ndarray) -> np.ndarray:
    """Raw 8-connected label image (0 = background); for audits and debugging."""
    labeled, _ = ndimage.label(mask, structure=_CONN8)
    return labeled
