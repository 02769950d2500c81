"""Integer pixel boxes, IoU and the geometric transforms used by augmentation.

Boxes use inclusive pixel indices: a box covering a single pixel has
``xmin == xmax`` and an area of 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import InvalidBox

#: Minimum fraction of a box's area that must survive a crop for it to be kept.
DEFAULT_VISIBILITY_FLOOR = 0.25

_FLIPS_AND_ROTATIONS = ("hflip", "vflip", "rot90", "rot180", "rot270")


@dataclass(frozen=True, slots=True, order=True)
class BoundingBox:
    xmin: int
    ymin: int
    xmax: int
    ymax: int

    def __post_init__(self):
        for v in (self.xmin, self.ymin, self.xmax, self.ymax):
            if not isinstance(v, int) or isinstance(v, bool):
                raise InvalidBox(f"coordinates must be integers, got {v!r}")
        if self.xmin < 0 or self.ymin < 0:
            raise InvalidBox(f"negative coordinate in {self.as_tuple()}")
        if self.xmin > self.xmax or self.ymin > self.ymax:
            raise InvalidBox(f"inverted box {self.as_tuple()}")

    @property
    def width(self) -> int:
        return self.xmax - self.xmin + 1

    @property
    def height(self) -> int:
        return self.ymax - self.ymin + 1

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.xmin, self.ymin, self.xmax, self.ymax)

    def fits(self, width: int, height: int) -> bool:
        """True when the box lies inside a ``width`` x ``height`` image."""
        return self.xmax <= width - 1 and self.ymax <= height - 1


def area(b: BoundingBox) -> int:
    return (b.xmax - b.xmin + 1) * (b.ymax - b.ymin + 1)


def intersection_area(a: BoundingBox, b: BoundingBox) -> int:
    iw = min(a.xmax, b.xmax) - max(a.xmin, b.xmin) + 1
    if iw <= 0:
        return 0
    ih = min(a.ymax, b.ymax) - max(a.ymin, b.ymin) + 1
    if ih <= 0:
        return 0
    return iw * ih


def iou_fraction(a: BoundingBox, b: BoundingBox) -> tuple[int, int]:
    """Return IoU as an exact ``(intersection, union)`` pair of pixel counts."""
    inter = intersection_area(a, b)
    return inter, area(a) + area(b) - inter


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes, in [0, 1]."""
    inter, union = iou_fraction(a, b)
    if inter == 0:
        return 0.0
    return inter / union


@dataclass(frozen=True)
class BoxTransform:
    """A geometric image transform.

    ``kind`` is one of ``hflip``, ``vflip``, ``rot90``, ``rot180``,
    ``rot270``, ``scale`` or ``crop``. Rotations are counter-clockwise,
    matching ``numpy.rot90``. ``scale`` uses ``sx``/``sy``; ``crop`` uses
    ``region`` (inclusive, in source image coordinates).
    """

    kind: str
    sx: float = 1.0
    sy: float = 1.0
    region: Optional[BoundingBox] = None

    def __post_init__(self):
        if self.kind in _FLIPS_AND_ROTATIONS:
            return
        if self.kind == "scale":
            if not (self.sx > 0 and self.sy > 0) or not (math.isfinite(self.sx) and math.isfinite(self.sy)):
                raise ValueError(f"scale factors must be positive, got ({self.sx}, {self.sy})")
        elif self.kind == "crop":
            if not isinstance(self.region, BoundingBox):
                raise ValueError("crop requires a BoundingBox region")
        else:
            raise ValueError(f"unknown transform kind {self.kind!r}")

    @classmethod
    def scale(cls, sx: float, sy: float) -> "BoxTransform":
        return cls("scale", sx=sx, sy=sy)

    @classmethod
    def crop(cls, region: BoundingBox) -> "BoxTransform":
        return cls("crop", region=region)

    def output_size(self, width: int, height: int) -> tuple[int, int]:
        """Size of the destination image for a ``width`` x ``height`` source."""
        if self.kind in ("rot90", "rot270"):
            return height, width
        if self.kind == "scale":
            return scaled_length(width, self.sx), scaled_length(height, self.sy)
        if self.kind == "crop":
            return self.region.width, self.region.height
        return width, height


def scaled_length(n: int, factor: float) -> int:
    # round half up, never below one pixel
    return max(1, math.floor(n * factor + 0.5))


def transform_box(
    b: BoundingBox,
    t: BoxTransform,
    image_width: int,
    image_height: int,
    visibility_floor: float = DEFAULT_VISIBILITY_FLOOR,
) -> Optional[BoundingBox]:
    """Map ``b`` through ``t``; ``None`` when the box does not survive a crop."""
    if image_width < 1 or image_height < 1:
        raise ValueError("image dimensions must be positive")
    if not b.fits(image_width, image_height):
        raise InvalidBox(f"box {b.as_tuple()} outside {image_width}x{image_height} image")
    W, H = image_width, image_height
    x0, y0, x1, y1 = b.as_tuple()
    kind = t.kind
    if kind == "hflip":
        return BoundingBox(W - 1 - x1, y0, W - 1 - x0, y1)
    if kind == "vflip":
        return BoundingBox(x0, H - 1 - y1, x1, H - 1 - y0)
    if kind == "rot180":
        return BoundingBox(W - 1 - x1, H - 1 - y1, W - 1 - x0, H - 1 - y0)
    if kind == "rot90":
        # (x, y) -> (y, W-1-x)
        return BoundingBox(y0, W - 1 - x1, y1, W - 1 - x0)
    if kind == "rot270":
        # (x, y) -> (H-1-y, x)
        return BoundingBox(H - 1 - y1, x0, H - 1 - y0, x1)
    if kind == "scale":
        nw, nh = t.output_size(W, H)
        # pixel i spans [i, i+1); take every destination pixel the scaled span touches
        nx0 = min(math.floor(x0 * t.sx), nw - 1)
        ny0 = min(math.floor(y0 * t.sy), nh - 1)
        nx1 = min(max(math.ceil((x1 + 1) * t.sx) - 1, nx0), nw - 1)
        ny1 = min(max(math.ceil((y1 + 1) * t.sy) - 1, ny0), nh - 1)
        return BoundingBox(nx0, ny0, nx1, ny1)
    # crop
    r = t.region
    if not r.fits(W, H):
        raise InvalidBox(f"crop region {r.as_tuple()} outside {W}x{H} image")
    cx0, cy0 = max(x0, r.xmin), max(y0, r.ymin)
    cx1, cy1 = min(x1, r.xmax), min(y1, r.ymax)
    if cx0 > cx1 or cy0 > cy1:
        return None
    kept = (cx1 - cx0 + 1) * (cy1 - cy0 + 1)
    if kept < visibility_floor * area(b):
        return None
    return BoundingBox(cx0 - r.xmin, cy0 - r.ymin, cx1 - r.xmin, cy1 - r.ymin)
