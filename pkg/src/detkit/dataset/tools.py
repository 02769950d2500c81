"""Directory-level dataset chores: validation, label-map generation, packing."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from ..errors import (
    BadImage,
    DimensionMismatch,
    EmptyLabelMap,
    InvalidBox,
    IoFailure,
    ParseError,
    UnknownClass,
)
from ..formats.annotations import ImageAnnotation
from ..formats.labelmap import LabelMap
from ..formats.records import RecordEntry, RecordFile
from ..formats.voc import IMAGE_SUFFIXES, parse_voc_annotation, read_object_names
from .images import decode_image, image_size


@dataclass(frozen=True, order=True)
class Finding:
    item: str
    kind: str  # MissingImage, MissingAnnotation, InvalidBox, UnknownClass, ParseError, DimensionMismatch, BadImage
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.findings

    def count(self, kind: str) -> int:
        return sum(1 for f in self.findings if f.kind == kind)

    def summary(self) -> str:
        lines = [f"{f.kind}\t{f.item}\t{f.detail}".rstrip() for f in self.findings]
        lines.append(f"{len(self.findings)} finding(s)")
        return "\n".join(lines) + "\n"


def _listdir(directory: Path, suffixes: Iterable[str]) -> dict[str, Path]:
    suffixes = tuple(suffixes)
    try:
        paths = [p for p in Path(directory).iterdir() if p.is_file() and p.suffix.lower() in suffixes]
    except OSError as e:
        raise IoFailure(f"cannot read directory {directory}: {e}") from e
    out: dict[str, Path] = {}
    for p in sorted(paths):
        out.setdefault(p.stem, p)
    return out


def list_images(directory) -> dict[str, Path]:
    """Image files keyed by stem (first by sorted name wins on duplicates)."""
    return _listdir(Path(directory), IMAGE_SUFFIXES)


def list_annotations(directory) -> dict[str, Path]:
    return _listdir(Path(directory), (".xml",))


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e


def validate_dataset(images_dir, annotations_dir, labels: LabelMap) -> ValidationReport:
    images = list_images(images_dir)
    annotations = list_annotations(annotations_dir)
    findings = []
    for stem in sorted(set(images) - set(annotations)):
        findings.append(Finding(stem, "MissingAnnotation", images[stem].name))
    for stem, path in annotations.items():
        try:
            ann = parse_voc_annotation(_read(path), labels)
        except UnknownClass as e:
            findings.append(Finding(stem, "UnknownClass", e.name))
            continue
        except ParseError as e:
            findings.append(Finding(stem, "ParseError", str(e)))
            continue
        except InvalidBox as e:
            findings.append(Finding(stem, "InvalidBox", str(e)))
            continue
        if stem not in images:
            findings.append(Finding(stem, "MissingImage", path.name))
            continue
        try:
            w, h = image_size(_read(images[stem]), images[stem])
        except BadImage as e:
            findings.append(Finding(stem, "BadImage", str(e)))
            continue
        if (w, h) != (ann.width, ann.height):
            findings.append(
                Finding(stem, "DimensionMismatch", f"annotation {ann.width}x{ann.height}, image {w}x{h}")
            )
    return ValidationReport(tuple(sorted(findings)))


def _class_sort_key(names: list[str]):
    def leading_int(name: str):
        head = name.split()[0] if name.split() else ""
        try:
            return int(head)
        except ValueError:
            return None

    if all(leading_int(n) is not None for n in names):
        return lambda n: (leading_int(n), n)
    return lambda n: n


def labelmap_from_names(names: Iterable[str]) -> LabelMap:
    """Distinct names, numerically ordered when every name starts with an integer."""
    distinct = sorted({n.strip() for n in names if n.strip()})
    if not distinct:
        raise EmptyLabelMap("no class names found")
    return LabelMap(tuple(sorted(distinct, key=_class_sort_key(distinct))))


def generate_labelmap(annotations_dir) -> LabelMap:
    paths = list_annotations(annotations_dir)
    if not paths:
        raise EmptyLabelMap(f"no annotations in {annotations_dir}")
    names: list[str] = []
    for path in paths.values():
        names.extend(read_object_names(_read(path)))
    return labelmap_from_names(names)


def pack_records(pairs: Iterable[tuple[Path, ImageAnnotation]], labels: LabelMap) -> RecordFile:
    """Bundle encoded images with their annotations, ordered by image id."""
    entries = []
    for image_path, ann in sorted(pairs, key=lambda pair: pair[1].image_id):
        for o in ann.objects:
            if not 0 <= o.class_id < len(labels):
                raise ValueError(f"{ann.image_id}: class id {o.class_id} not in label map")
        try:
            data = Path(image_path).read_bytes()
        except OSError as e:
            raise BadImage(image_path, str(e)) from None
        raster, encoding = decode_image(data, image_path)
        if (raster.width, raster.height) != (ann.width, ann.height):
            raise DimensionMismatch(
                f"{ann.image_id}: annotation {ann.width}x{ann.height}, image {raster.width}x{raster.height}"
            )
        entries.append(RecordEntry(ann, data, encoding))
    return RecordFile(tuple(entries))


def validate_records(r: RecordFile) -> None:
    """Decode every entry and check it against its annotation's dimensions."""
    for entry in r.entries:
        a = entry.annotation
        raster, encoding = decode_image(entry.image, a.image_id)
        if (raster.width, raster.height) != (a.width, a.height) or encoding != entry.encoding:
            raise DimensionMismatch(
                f"{a.image_id}: annotation {a.width}x{a.height} {entry.encoding}, "
                f"image {raster.width}x{raster.height} {encoding}"
            )


def collect_pairs(images_dir, annotations_dir, labels: LabelMap) -> list[tuple[Path, ImageAnnotation]]:
    """(image path, parsed annotation) for every annotation with a matching image."""
    images = list_images(images_dir)
    pairs = []
    for stem, path in list_annotations(annotations_dir).items():
        if stem not in images:
            continue
        pairs.append((images[stem], parse_voc_annotation(_read(path), labels)))
    return pairs
