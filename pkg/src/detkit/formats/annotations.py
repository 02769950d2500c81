"""Annotation records shared by the parsers, matcher and dataset tools."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InvalidBox
from ..geometry import BoundingBox


@dataclass(frozen=True, slots=True)
class GroundTruthObject:
    class_id: int
    box: BoundingBox
    difficult: bool = False


@dataclass(frozen=True, slots=True)
class Detection:
    image_id: str
    class_id: int
    confidence: float
    box: BoundingBox

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence!r} outside [0, 1]")


@dataclass(frozen=True)
class ImageAnnotation:
    image_id: str
    width: int
    height: int
    depth: int = 3
    objects: tuple[GroundTruthObject, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        if self.width < 1 or self.height < 1:
            raise InvalidBox(f"image size {self.width}x{self.height} must be positive")
        for obj in self.objects:
            if not obj.box.fits(self.width, self.height):
                raise InvalidBox(
                    f"box {obj.box.as_tuple()} outside {self.width}x{self.height} image {self.image_id!r}"
                )
