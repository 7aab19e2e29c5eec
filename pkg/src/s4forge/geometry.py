"""Axis-aligned boxes and the render viewport, in CSS pixels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import GeometryError


@dataclass(frozen=True)
class Viewport:
    width_px: int = 1280
    height_px: int = 1280

    def __post_init__(self) -> None:
        if self.width_px <= 0 or self.height_px <= 0:
            raise GeometryError(f"viewport must be positive, got {self.width_px}x{self.height_px}")


@dataclass(frozen=True)
class BBox:
    """Box as (x_min, y_min, x_max, y_max); min <= max on both axes."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise GeometryError(
                f"inverted box ({self.x_min}, {self.y_min}, {self.x_max}, {self.y_max})"
            )

    @classmethod
    def from_seq(cls, seq: Sequence[float]) -> "BBox":
        if len(seq) != 4:
            raise GeometryError(f"box needs 4 coordinates, got {len(seq)}")
        return cls(float(seq[0]), float(seq[1]), float(seq[2]), float(seq[3]))

    def to_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    def center(self) -> tuple[float, float]:
        return (self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0

    def clip(self, vp: Viewport) -> "BBox":
        """Clamp all coordinates into [0, viewport extent]."""
        return BBox(
            min(max(self.x_min, 0.0), vp.width_px),
            min(max(self.y_min, 0.0), vp.height_px),
            min(max(self.x_max, 0.0), vp.width_px),
            min(max(self.y_max, 0.0), vp.height_px),
        )

    def contains(self, other: "BBox", tol: float = 0.0) -> bool:
        """True if *other* lies inside self, allowing *tol* px of slack per edge."""
        return (
            other.x_min >= self.x_min - tol
            and other.y_min >= self.y_min - tol
            and other.x_max <= self.x_max + tol
            and other.y_max <= self.y_max + tol
        )

    def union(self, other: "BBox") -> "BBox":
        return BBox(
            min(self.x_min, other.x_min),
            min(self.y_min, other.y_min),
            max(self.x_max, other.x_max),
            max(self.y_max, other.y_max),
        )


def union_all(boxes: Iterable[BBox]) -> BBox:
    """Smallest box containing every input box; raises on an empty iterable."""
    it = iter(boxes)
    try:
        acc = next(it)
    except StopIteration:
        raise GeometryError("union of zero boxes") from None
    for b in it:
        acc = acc.union(b)
    return acc
