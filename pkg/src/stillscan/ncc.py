"""Normalized cross-correlation monitoring of confirmed stationary objects.

When an object is confirmed parked, the pixels inside its bounding rectangle
are registered as a reference patch. On a fixed cadence (about twice per
second of video) the same rectangle in the current frame is compared to the
reference by NCC; a value below the threshold means the object moved. Checks
are postponed while moving pixels crowd the rectangle, and the reference is
periodically refreshed against slow illumination drift.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import GrayFrame
from .geometry import Rect


def ncc(reference: np.ndarray, current: np.ndarray) -> float:
    """Normalized cross-correlation of two equal-size patches, in [-1, 1].

    Both patches are mean-centered and variance-normalized, so the result is
    invariant under positive affine relighting of either patch. Raises on a
    constant patch (zero variance makes the value undefined).
    """
    if reference.shape != current.shape:
        raise ValueError(
            f"patch dimension mismatch: {reference.shape} vs {current.shape}"
        )
    r = reference.astype(np.float64, copy=False)
    c = current.astype(np.float64, copy=False)
    r_dev = r - r.mean()
    c_dev = c - c.mean()
    r_norm = np.sqrt(np.sum(r_dev * r_dev))
    c_norm = np.sqrt(np.sum(c_dev * c_dev))
    if r_norm == 0.0 or c_norm == 0.0:
        raise ValueError("constant patch: NCC undefined (zero variance)")
    return float(np.sum(r_dev * c_dev) / (r_norm * c_norm))


def occlusion_guard(
    motion: np.ndarray, bbox: Rect, halo: int, occlusion_fraction: float
) -> bool:
    """True when moving pixels around bbox call for postponing the NCC check.

    Counts motion pixels inside bbox expanded by `halo` (clipped to the frame)
    and postpones when the count strictly exceeds occlusion_fraction times the
    unexpanded bbox area.
    """
    height, width = motion.shape
    region = bbox.expand(halo).clip(width, height)
    if region is None:
        return False
    count = int(motion[region.y : region.y2, region.x : region.x2].sum())
    return count > occlusion_fraction * bbox.area


@dataclass
class ReferencePatch:
    """Registered appearance of one parked object."""

    object_id: int
    bbox: Rect
    pixels: np.ndarray
    registered_frame: int
    last_refresh_frame: int
    last_ncc: float | None = None
    postponed: bool = False


@dataclass(frozen=True)
class MonitorOutcome:
    object_id: int
    outcome: str  # present | moved | postponed | skipped
    gamma: float | None = None


class StationaryObjectMonitor:
    """Tracks reference patches and schedules their NCC checks."""

    def __init__(
        self,
        fps: float,
        ncc_threshold: float = 0.90,
        refresh_interval_s: float = 30.0,
        refresh_min_ncc: float = 0.95,
        refresh_enabled: bool = True,
        halo: int = 4,
        occlusion_fraction: float = 0.10,
    ):
        if fps <= 0:
            raise ValueError("fps must be positive")
        self.fps = fps
        self.check_interval = max(1, int(round(fps / 2.0)))
        self.ncc_threshold = ncc_threshold
        self.refresh_interval_frames = max(1, int(round(refresh_interval_s * fps)))
        self.refresh_min_ncc = refresh_min_ncc
        self.refresh_enabled = refresh_enabled
        self.halo = halo
        self.occlusion_fraction = occlusion_fraction
        self.references: dict[int, ReferencePatch] = {}

    def register(self, frame: GrayFrame, object_id: int, bbox: Rect) -> ReferencePatch:
        """Store the object's current appearance as its reference patch."""
        if not Rect(0, 0, frame.width, frame.height).contains_rect(bbox):
            raise ValueError(
                f"bbox {tuple(bbox)} is not inside frame "
                f"{frame.width}x{frame.height}"
            )
        patch = frame.pixels[bbox.y : bbox.y2, bbox.x : bbox.x2].copy()
        if patch.min() == patch.max():
            raise ValueError("constant patch: cannot register for NCC monitoring")
        ref = ReferencePatch(
            object_id=object_id,
            bbox=bbox,
            pixels=patch,
            registered_frame=frame.frame_index,
            last_refresh_frame=frame.frame_index,
        )
        self.references[object_id] = ref
        return ref

    def release(self, object_id: int) -> None:
        self.references.pop(object_id, None)

    def step(self, frame: GrayFrame, motion: np.ndarray) -> list[MonitorOutcome]:
        """Run due checks for every reference; postponed checks retry next frame."""
        outcomes = []
        for ref in self.references.values():
            scheduled = frame.frame_index % self.check_interval == 0
            if not (scheduled or ref.postponed):
                outcomes.append(MonitorOutcome(ref.object_id, "skipped"))
                continue
            if occlusion_guard(motion, ref.bbox, self.halo, self.occlusion_fraction):
                ref.postponed = True
                outcomes.append(MonitorOutcome(ref.object_id, "postponed"))
                continue
            ref.postponed = False
            bbox = ref.bbox
            current = frame.pixels[bbox.y : bbox.y2, bbox.x : bbox.x2]
            gamma = ncc(ref.pixels, current)
            ref.last_ncc = gamma
            if gamma >= self.ncc_threshold:
                due_refresh = self.refresh_enabled and (
                    frame.frame_index - ref.last_refresh_frame
                    >= self.refresh_interval_frames
                )
                if due_refresh and gamma >= self.refresh_min_ncc:
                    ref.pixels = current.copy()
                    ref.last_refresh_frame = frame.frame_index
                outcomes.append(MonitorOutcome(ref.object_id, "present", gamma))
            else:
                outcomes.append(MonitorOutcome(ref.object_id, "moved", gamma))
        return outcomes
