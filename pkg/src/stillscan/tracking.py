"""Rectangle-overlap blob tracking with persistence counters.

Blobs are matched frame to frame when their bounding rectangles overlap by
more than the configured fraction; objects matched over enough consecutive
frames become stationary candidates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .binary_ops import Blob
from .geometry import Rect


def rect_overlap(a: Rect, b: Rect, mode: str = "min_area") -> float:
    """Overlap fraction of two rectangles in [0, 1].

    ``min_area`` divides the intersection by the smaller rectangle's area,
    which stays high when a blob shrinks; ``iou`` is intersection over union.
    """
    inter = a.intersection(b)
    if inter is None:
        return 0.0
    if mode == "min_area":
        return inter.area / min(a.area, b.area)
    if mode == "iou":
        return inter.area / (a.area + b.area - inter.area)
    raise ValueError(f"unknown overlap mode {mode!r}")


@dataclass
class TrackedObject:
    """A blob followed across frames with its persistence bookkeeping."""

    id: int
    bbox: Rect
    consecutive_frames: int
    first_seen_frame: int
    last_matched_frame: int
    missed_frames: int = 0


class ObjectRegistry:
    """Greedy rectangle-overlap matcher from blobs to tracked objects.

    Blobs are matched in blob order, each object at most once per frame and
    ambiguity broken by largest overlap. Objects missing longer than
    ``miss_limit`` frames are dropped; ids are never reused within a run.
    """

    def __init__(self, overlap_threshold: float = 0.8, miss_limit: int = 5,
                 overlap_mode: str = "min_area"):
        if not 0 < overlap_threshold <= 1:
            raise ValueError("overlap_threshold must be in (0, 1]")
        if miss_limit < 0:
            raise ValueError("miss_limit must be >= 0")
        self.overlap_threshold = overlap_threshold
        self.miss_limit = miss_limit
        self.overlap_mode = overlap_mode
        self.objects: list[TrackedObject] = []
        self._next_id = 1

    def step(self, blobs: list[Blob], frame_index: int) -> list[TrackedObject]:
        """Fold one frame's blobs into the registry; returns live objects."""
        matched_ids: set[int] = set()
        for blob in blobs:
            best_obj = None
            best_overlap = self.overlap_threshold  # strict ">" below
            for obj in self.objects:
                if obj.id in matched_ids:
                    continue
                overlap = rect_overlap(blob.bbox, obj.bbox, self.overlap_mode)
                if overlap > best_overlap:
                    best_obj = obj
                    best_overlap = overlap
            if best_obj is None:
                self.objects.append(TrackedObject(
                    id=self._next_id,
                    bbox=blob.bbox,
                    consecutive_frames=1,
                    first_seen_frame=frame_index,
                    last_matched_frame=frame_index,
                ))
                matched_ids.add(self._next_id)
                self._next_id += 1
            else:
                best_obj.bbox = blob.bbox
                best_obj.consecutive_frames += 1
                best_obj.last_matched_frame = frame_index
                best_obj.missed_frames = 0
                matched_ids.add(best_obj.id)
        survivors = []
        for obj in self.objects:
            if obj.id not in matched_ids:
                obj.missed_frames += 1
                if obj.missed_frames > self.miss_limit:
                    continue
            survivors.append(obj)
        self.objects = survivors
        return self.objects

    def candidates(self, promote_frames: int) -> list[TrackedObject]:
        """Objects persistent for at least promote_frames consecutive matches."""
        return [o for o in self.objects if o.consecutive_frames >= promote_frames]
