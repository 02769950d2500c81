"""Seeded, box-aware augmentation.

An op list is applied in order to every variant. Each op fires with
probability ``p`` and draws its parameters uniformly from ``[low, high]``;
draws come from a generator keyed by ``(seed, image_id, variant)``.

Op syntax (comma separated, used by the CLI)::

    hflip  vflip  rot90  rot180  rot270       geometric, no parameters
    scale=LOW:HIGH                             uniform scale factor (both axes)
    crop=LOW:HIGH                              kept fraction of each side
    brightness=LOW:HIGH                        integer delta in [-255, 255]
    contrast=LOW:HIGH                          scale in (0, 4] around 128

Any op may carry ``@P`` for a firing probability, e.g. ``hflip@0.5``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from ..formats.annotations import GroundTruthObject, ImageAnnotation
from ..geometry import DEFAULT_VISIBILITY_FLOOR, BoundingBox, BoxTransform, transform_box
from .images import ImageRaster, resize_raster
from .split import keyed_rng

GEOMETRIC = ("hflip", "vflip", "rot90", "rot180", "rot270", "scale", "crop")
PHOTOMETRIC = ("brightness", "contrast")
_DEFAULT_RANGES = {
    "scale": (0.8, 1.2),
    "crop": (0.7, 1.0),
    "brightness": (-32.0, 32.0),
    "contrast": (0.75, 1.25),
}


@dataclass(frozen=True)
class AugmentOp:
    kind: str
    low: Optional[float] = None
    high: Optional[float] = None
    p: float = 1.0

    def __post_init__(self):
        if self.kind not in GEOMETRIC + PHOTOMETRIC:
            raise ValueError(f"unknown augmentation op {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"probability {self.p} outside [0, 1]")
        if self.kind in _DEFAULT_RANGES:
            lo, hi = _DEFAULT_RANGES[self.kind]
            low = lo if self.low is None else self.low
            high = hi if self.high is None else self.high
            object.__setattr__(self, "low", float(low))
            object.__setattr__(self, "high", float(high))
            if low > high:
                raise ValueError(f"{self.kind}: empty range [{low}, {high}]")
            bounds = {
                "scale": (0.0, math.inf),
                "crop": (0.0, 1.0),
                "brightness": (-255.0, 255.0),
                "contrast": (0.0, 4.0),
            }[self.kind]
            open_low = self.kind in ("scale", "crop", "contrast")
            if (low <= bounds[0] if open_low else low < bounds[0]) or high > bounds[1]:
                raise ValueError(f"{self.kind}: range [{low}, {high}] outside allowed bounds")
        elif self.low is not None or self.high is not None:
            raise ValueError(f"{self.kind} takes no parameters")


def parse_ops(text: str) -> list[AugmentOp]:
    ops = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        p = 1.0
        if "@" in item:
            item, p_text = item.split("@", 1)
            p = float(p_text)
        kind, _, params = item.partition("=")
        low = high = None
        if params:
            parts = params.split(":")
            if len(parts) == 1:
                low = high = float(parts[0])
            elif len(parts) == 2:
                low, high = float(parts[0]), float(parts[1])
            else:
                raise ValueError(f"bad parameter range {params!r}")
        ops.append(AugmentOp(kind.strip(), low, high, p))
    if not ops:
        raise ValueError("empty op list")
    return ops


@dataclass(frozen=True)
class AugmentPlan:
    ops: tuple[AugmentOp, ...]
    variants_per_image: int = 1
    seed: int = 0
    visibility_floor: float = DEFAULT_VISIBILITY_FLOOR

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        if self.variants_per_image < 1:
            raise ValueError("variants_per_image must be >= 1")


class AugmentedVariant(NamedTuple):
    image: ImageRaster
    annotation: ImageAnnotation
    variant_id: int
    empty: bool  # no boxes left


def variant_image_id(image_id: str, variant: int) -> str:
    return f"{image_id}_aug{variant:03d}"


def adjust_brightness(px: np.ndarray, delta: int) -> np.ndarray:
    return np.clip(px.astype(np.int16) + delta, 0, 255).astype(np.uint8)


def adjust_contrast(px: np.ndarray, scale: float) -> np.ndarray:
    out = np.floor(128.0 + scale * (px.astype(np.float64) - 128.0) + 0.5)
    return np.clip(out, 0, 255).astype(np.uint8)


def apply_transform(px: np.ndarray, t: BoxTransform) -> np.ndarray:
    """Apply a geometric transform to a ``(height, width, channels)`` array."""
    if t.kind == "hflip":
        return px[:, ::-1]
    if t.kind == "vflip":
        return px[::-1]
    if t.kind == "rot90":
        return np.rot90(px, 1)
    if t.kind == "rot180":
        return px[::-1, ::-1]
    if t.kind == "rot270":
        return np.rot90(px, -1)
    if t.kind == "scale":
        w, h = t.output_size(px.shape[1], px.shape[0])
        return resize_raster(ImageRaster(np.ascontiguousarray(px)), w, h).pixels
    r = t.region
    return px[r.ymin : r.ymax + 1, r.xmin : r.xmax + 1]


def _draw_transform(op: AugmentOp, rng: np.random.Generator, width: int, height: int) -> BoxTransform:
    if op.kind == "scale":
        s = float(rng.uniform(op.low, op.high))
        return BoxTransform.scale(s, s)
    if op.kind == "crop":
        fw, fh = rng.uniform(op.low, op.high, size=2)
        cw = min(width, max(1, math.floor(width * fw + 0.5)))
        ch = min(height, max(1, math.floor(height * fh + 0.5)))
        x0 = int(rng.integers(0, width - cw + 1))
        y0 = int(rng.integers(0, height - ch + 1))
        return BoxTransform.crop(BoundingBox(x0, y0, x0 + cw - 1, y0 + ch - 1))
    return BoxTransform(op.kind)


def augment(img: ImageRaster, ann: ImageAnnotation, plan: AugmentPlan) -> list[AugmentedVariant]:
    if (img.width, img.height) != (ann.width, ann.height):
        raise ValueError(f"annotation says {ann.width}x{ann.height}, image is {img.width}x{img.height}")
    out = []
    for v in range(plan.variants_per_image):
        rng = keyed_rng(plan.seed, ann.image_id, v)
        px = img.pixels
        width, height = img.width, img.height
        objects: list[GroundTruthObject] = list(ann.objects)
        for op in plan.ops:
            fire = rng.random() < op.p
            if op.kind == "brightness":
                delta = int(round(rng.uniform(op.low, op.high)))
                if fire:
                    px = adjust_brightness(px, delta)
            elif op.kind == "contrast":
                scale = float(rng.uniform(op.low, op.high))
                if fire:
                    px = adjust_contrast(px, scale)
            else:
                # parameters are drawn even when the op does not fire
                t = _draw_transform(op, rng, width, height)
                if not fire:
                    continue
                moved = []
                for o in objects:
                    b = transform_box(o.box, t, width, height, plan.visibility_floor)
                    if b is not None:
                        moved.append(GroundTruthObject(o.class_id, b, o.difficult))
                objects = moved
                px = apply_transform(px, t)
                width, height = t.output_size(width, height)
        raster = ImageRaster(np.ascontiguousarray(px))
        annotation = ImageAnnotation(
            variant_image_id(ann.image_id, v), width, height, raster.channels, tuple(objects)
        )
        out.append(AugmentedVariant(raster, annotation, v, not objects))
    return out
