"""Axis-aligned integer rectangles used for ROIs, blobs and tracked objects."""

from __future__ import annotations

from typing import NamedTuple


class Rect(NamedTuple):
    """Rectangle in pixel coordinates; (x, y) is the top-left corner."""

    x: int
    y: int
    w: int
    h: int

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def x2(self) -> int:
        """One past the right edge."""
        return self.x + self.w

    @property
    def y2(self) -> int:
        """One past the bottom edge."""
        return self.y + self.h

    def intersection(self, other: "Rect") -> "Rect | None":
        """Overlapping region of two rectangles, or None when disjoint."""
        x1 = max(self.x, other.x)
        y1 = max(self.y, other.y)
        x2 = min(self.x2, other.x2)
        y2 = min(self.y2, other.y2)
        if x2 <= x1 or y2 <= y1:
            return None
        return Rect(x1, y1, x2 - x1, y2 - y1)

    def expand(self, margin: int) -> "Rect":
        """Grow the rectangle by `margin` pixels on every side."""
        return Rect(self.x - margin, self.y - margin,
                    self.w + 2 * margin, self.h + 2 * margin)

    def clip(self, width: int, height: int) -> "Rect | None":
        """Restrict to a width x height canvas; None if nothing remains."""
        return self.intersection(Rect(0, 0, width, height))

    def contains_rect(self, other: "Rect") -> bool:
        return (self.x <= other.x and self.y <= other.y
                and other.x2 <= self.x2 and other.y2 <= self.y2)


def rect_from_sequence(values) -> Rect:
    """Build a Rect from a [x, y, w, h] sequence, validating shape and sign."""
    vals = list(values)
    if len(vals) != 4:
        raise ValueError(f"rectangle needs 4 values [x, y, w, h], got {len(vals)}")
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in vals):
        raise ValueError(f"rectangle values must be integers, got {vals!r}")
    x, y, w, h = vals
    if w <= 0 or h <= 0:
        raise ValueError(f"rectangle width/height must be positive, got {w}x{h}")
    return Rect(x, y, w, h)
