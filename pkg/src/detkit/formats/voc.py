"""Pascal VOC XML annotations as written by labelImg."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import PurePath

from ..errors import InvalidBox, ParseError, UnknownClass
from ..geometry import BoundingBox
from .annotations import GroundTruthObject, ImageAnnotation
from .labelmap import LabelMap

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp")


def image_id_from_filename(filename: str) -> str:
    """Strip a known image extension; other names are kept whole."""
    p = PurePath(filename)
    if p.suffix.lower() in IMAGE_SUFFIXES:
        return p.stem
    return p.name


def _text(node: ET.Element, tag: str, required: bool = True) -> str | None:
    child = node.find(tag)
    if child is None or child.text is None:
        if required:
            raise ParseError(f"missing <{tag}> in <{node.tag}>")
        return None
    return child.text.strip()


def _int(node: ET.Element, tag: str) -> int:
    raw = _text(node, tag)
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"<{tag}> is not an integer: {raw!r}") from None


def parse_voc_annotation(xml: bytes, labels: LabelMap) -> ImageAnnotation:
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as e:
        raise ParseError(f"malformed XML: {e}", line=e.position[0]) from None
    if root.tag != "annotation":
        raise ParseError(f"root element is <{root.tag}>, expected <annotation>")

    filename = _text(root, "filename")
    size = root.find("size")
    if size is None:
        raise ParseError("missing <size>")
    width, height = _int(size, "width"), _int(size, "height")
    depth = _int(size, "depth") if size.find("depth") is not None else 3
    if width < 1 or height < 1:
        raise InvalidBox(f"image size {width}x{height} must be positive")

    objects = []
    for obj in root.iter("object"):
        name = _text(obj, "name")
        if name not in labels:
            raise UnknownClass(name)
        difficult_raw = _text(obj, "difficult", required=False)
        if difficult_raw in (None, "", "0"):
            difficult = False
        elif difficult_raw == "1":
            difficult = True
        else:
            raise ParseError(f"<difficult> must be 0 or 1, got {difficult_raw!r}")
        bnd = obj.find("bndbox")
        if bnd is None:
            raise ParseError(f"object {name!r} has no <bndbox>")
        box = BoundingBox(_int(bnd, "xmin"), _int(bnd, "ymin"), _int(bnd, "xmax"), _int(bnd, "ymax"))
        if not box.fits(width, height):
            raise InvalidBox(f"box {box.as_tuple()} outside {width}x{height} image")
        objects.append(GroundTruthObject(labels.id_of(name), box, difficult))

    return ImageAnnotation(image_id_from_filename(filename), width, height, depth, tuple(objects))


def write_voc_annotation(a: ImageAnnotation, labels: LabelMap) -> bytes:
    root = ET.Element("annotation")
    ET.SubElement(root, "filename").text = a.image_id
    size = ET.SubElement(root, "size")
    ET.SubElement(size, "width").text = str(a.width)
    ET.SubElement(size, "height").text = str(a.height)
    ET.SubElement(size, "depth").text = str(a.depth)
    ET.SubElement(root, "segmented").text = "0"
    for o in a.objects:
        obj = ET.SubElement(root, "object")
        ET.SubElement(obj, "name").text = labels.name_of(o.class_id)
        ET.SubElement(obj, "pose").text = "Unspecified"
        ET.SubElement(obj, "truncated").text = "0"
        ET.SubElement(obj, "difficult").text = "1" if o.difficult else "0"
        bnd = ET.SubElement(obj, "bndbox")
        for tag, v in zip(("xmin", "ymin", "xmax", "ymax"), o.box.as_tuple()):
            ET.SubElement(bnd, tag).text = str(v)
    ET.indent(root, space="\t")
    return ET.tostring(root, encoding="utf-8", xml_declaration=False) + b"\n"


def read_object_names(xml: bytes) -> list[str]:
    """Class names of every object, without resolving them against a label map."""
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as e:
        raise ParseError(f"malformed XML: {e}", line=e.position[0]) from None
    return [_text(obj, "name") for obj in root.iter("object")]
