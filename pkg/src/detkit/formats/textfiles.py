"""Per-image ground-truth and detection text files.

One object per line::

    <class name> <xmin> <ymin> <xmax> <ymax> [difficult]     (ground truth)
    <class name> <confidence> <xmin> <ymin> <xmax> <ymax>    (detections)

Class names may contain spaces, so lines are tokenized from the right: the
numeric tail is consumed first and whatever remains is the class name.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterator

from ..errors import InvalidBox, IoFailure, ParseError, UnknownClass
from ..geometry import BoundingBox
from .annotations import Detection, GroundTruthObject
from .labelmap import LabelMap

DIFFICULT_TOKEN = "difficult"


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if tokens:
            yield lineno, tokens


def _class_id(name_tokens: list[str], labels: LabelMap, lineno: int) -> int:
    if not name_tokens:
        raise ParseError("missing class name", lineno)
    name = " ".join(name_tokens)
    if name not in labels:
        raise UnknownClass(name, lineno)
    return labels.id_of(name)


def _box(tokens: list[str], lineno: int) -> BoundingBox:
    try:
        coords = [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"non-integer box coordinates {' '.join(tokens)!r}", lineno) from None
    try:
        return BoundingBox(*coords)
    except InvalidBox as e:
        raise ParseError(str(e), lineno) from None


def parse_gt_file(text: str, image_id: str, labels: LabelMap) -> list[GroundTruthObject]:
    objects = []
    for lineno, tokens in _lines(text):
        difficult = tokens[-1] == DIFFICULT_TOKEN
        if difficult:
            tokens = tokens[:-1]
        if len(tokens) < 5:
            raise ParseError(f"expected '<class> xmin ymin xmax ymax', got {len(tokens)} tokens", lineno)
        box = _box(tokens[-4:], lineno)
        objects.append(GroundTruthObject(_class_id(tokens[:-4], labels, lineno), box, difficult))
    return objects


def parse_det_file(text: str, image_id: str, labels: LabelMap) -> list[Detection]:
    dets = []
    for lineno, tokens in _lines(text):
        if len(tokens) < 6:
            raise ParseError(
                f"expected '<class> confidence xmin ymin xmax ymax', got {len(tokens)} tokens", lineno
            )
        box = _box(tokens[-4:], lineno)
        try:
            conf = float(tokens[-5])
        except ValueError:
            raise ParseError(f"confidence {tokens[-5]!r} is not a number", lineno) from None
        if not (math.isfinite(conf) and 0.0 <= conf <= 1.0):
            raise ParseError(f"confidence {tokens[-5]} outside [0, 1]", lineno)
        dets.append(Detection(image_id, _class_id(tokens[:-5], labels, lineno), conf, box))
    return dets


def write_gt_file(objects, labels: LabelMap) -> str:
    out = []
    for o in objects:
        line = f"{labels.name_of(o.class_id)} {o.box.xmin} {o.box.ymin} {o.box.xmax} {o.box.ymax}"
        if o.difficult:
            line += " " + DIFFICULT_TOKEN
        out.append(line + "\n")
    return "".join(out)


def write_det_file(detections, labels: LabelMap) -> str:
    # repr() is the shortest string that round-trips the float exactly
    return "".join(
        f"{labels.name_of(d.class_id)} {d.confidence!r} {d.box.xmin} {d.box.ymin} {d.box.xmax} {d.box.ymax}\n"
        for d in detections
    )


def _read_dir(directory: Path) -> list[tuple[str, str]]:
    directory = Path(directory)
    try:
        paths = sorted((p for p in directory.iterdir() if p.suffix == ".txt"), key=lambda p: p.name)
    except OSError as e:
        raise IoFailure(f"cannot read directory {directory}: {e}") from e
    out = []
    for p in paths:
        try:
            out.append((p.stem, p.read_text(encoding="utf-8")))
        except OSError as e:
            raise IoFailure(f"cannot read {p}: {e}") from e
    return out


def _in_file(fn, path_stem: str, text: str, labels: LabelMap):
    try:
        return fn(text, path_stem, labels)
    except ParseError as e:
        e.args = (f"{path_stem}.txt: {e.args[0]}",)
        raise


def read_gt_dir(directory, labels: LabelMap) -> dict[str, list[GroundTruthObject]]:
    """Ground truth for every ``<image_id>.txt`` in ``directory``, keyed by image id."""
    return {stem: _in_file(parse_gt_file, stem, text, labels) for stem, text in _read_dir(directory)}


def read_det_dir(directory, labels: LabelMap) -> list[Detection]:
    dets: list[Detection] = []
    for stem, text in _read_dir(directory):
        dets.extend(_in_file(parse_det_file, stem, text, labels))
    return dets
