from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image

from ..errors import BadImage
from ..formats.annotations import GroundTruthObject, ImageAnnotation
from ..geometry import BoundingBox

log = logging.getLogger(__name__)

_PIL_FORMATS = {"PNG": "png", "JPEG": "jpeg"}


@dataclass(frozen=True, eq=False)
class ImageRaster:
    """8-bit image stored row-major as a ``(height, width, channels)`` array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = self.pixels
        if px.ndim != 3 or px.shape[2] not in (1, 3):
            raise ValueError(f"expected (height, width, 1|3) pixels, got shape {px.shape}")
        if px.dtype != np.uint8:
            raise ValueError(f"expected uint8 samples, got {px.dtype}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must be at least 1x1")

    @classmethod
    def from_bytes(cls, width: int, height: int, channels: int, samples: bytes) -> "ImageRaster":
        if len(samples) != width * height * channels:
            raise ValueError(f"{len(samples)} samples for a {width}x{height}x{channels} image")
        return cls(np.frombuffer(samples, dtype=np.uint8).reshape(height, width, channels).copy())

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    def tobytes(self) -> bytes:
        return np.ascontiguousarray(self.pixels).tobytes()

    def __eq__(self, other):
        if not isinstance(other, ImageRaster):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)

    def to_pil(self) -> Image.Image:
        px = np.ascontiguousarray(self.pixels)
        return Image.fromarray(px[:, :, 0] if self.channels == 1 else px)

    @classmethod
    def from_pil(cls, im: Image.Image) -> "ImageRaster":
        if im.mode not in ("L", "RGB"):
            im = im.convert("L" if im.mode in ("1", "I", "I;16", "F") else "RGB")
        px = np.asarray(im, dtype=np.uint8)
        if px.ndim == 2:
            px = px[:, :, None]
        return cls(px.copy())


def decode_image(data: bytes, name="<bytes>") -> tuple[ImageRaster, str]:
    """Decode PNG or JPEG bytes; returns the raster and its encoding tag."""
    try:
        with Image.open(io.BytesIO(data)) as im:
            fmt = im.format
            im.load()
            raster = ImageRaster.from_pil(im)
    except (OSError, SyntaxError, ValueError) as e:
        raise BadImage(name, str(e)) from None
    if fmt not in _PIL_FORMATS:
        raise BadImage(name, f"unsupported format {fmt}")
    return raster, _PIL_FORMATS[fmt]


def image_size(data: bytes, name="<bytes>") -> tuple[int, int]:
    """Width and height from the image header, without a full decode."""
    try:
        with Image.open(io.BytesIO(data)) as im:
            return im.size
    except (OSError, SyntaxError, ValueError) as e:
        raise BadImage(name, str(e)) from None


def encode_image(img: ImageRaster, encoding: str = "png") -> bytes:
    buf = io.BytesIO()
    if encoding == "png":
        img.to_pil().save(buf, format="PNG", optimize=False)
    elif encoding == "jpeg":
        img.to_pil().save(buf, format="JPEG", quality=95)
    else:
        raise ValueError(f"unsupported encoding {encoding!r}")
    return buf.getvalue()


def resize_raster(img: ImageRaster, width: int, height: int) -> ImageRaster:
    if (width, height) == (img.width, img.height):
        return ImageRaster(img.pixels.copy())
    return ImageRaster.from_pil(img.to_pil().resize((width, height), Image.Resampling.BILINEAR))


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def resize_with_boxes(
    img: ImageRaster, ann: ImageAnnotation, target: int = 320
) -> tuple[ImageRaster, ImageAnnotation]:
    """Bilinear resample to ``target`` x ``target`` and rescale every box."""
    if (img.width, img.height) != (ann.width, ann.height):
        raise ValueError(
            f"annotation says {ann.width}x{ann.height}, image is {img.width}x{img.height}"
        )
    sx, sy = target / ann.width, target / ann.height
    hi = target - 1
    objects = []
    dropped = 0
    for o in ann.objects:
        b = o.box
        x0, y0 = min(_round_half_up(b.xmin * sx), hi), min(_round_half_up(b.ymin * sy), hi)
        x1, y1 = min(_round_half_up(b.xmax * sx), hi), min(_round_half_up(b.ymax * sy), hi)
        if x0 > x1 or y0 > y1:
            dropped += 1
            continue
        objects.append(GroundTruthObject(o.class_id, BoundingBox(x0, y0, x1, y1), o.difficult))
    if dropped:
        log.warning("%s: dropped %d degenerate box(es) while resizing", ann.image_id, dropped)
    out = ImageAnnotation(ann.image_id, target, target, img.channels, tuple(objects))
    return resize_raster(img, target, target), out
