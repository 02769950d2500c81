"""DREC: a small length-prefixed container of annotated, encoded images.

Layout::

    "DREC" 0x01                     5-byte header
    repeated:
      u32 LE meta_len, meta JSON    (image_id, width, height, depth, encoding, objects)
      u32 LE img_len,  image bytes

The file must end exactly at a record boundary.
"""

from __future__ import annotations

import io
import json
import struct
from dataclasses import dataclass
from typing import BinaryIO, Union

from ..errors import NotARecordFile, ParseError, TruncatedRecord
from ..geometry import BoundingBox
from .annotations import GroundTruthObject, ImageAnnotation

MAGIC = b"DREC"
VERSION = 1
HEADER = MAGIC + bytes([VERSION])
ENCODINGS = ("png", "jpeg")

_U32 = struct.Struct("<I")


@dataclass(frozen=True)
class RecordEntry:
    annotation: ImageAnnotation
    image: bytes
    encoding: str

    def __post_init__(self):
        if self.encoding not in ENCODINGS:
            raise ValueError(f"encoding must be one of {ENCODINGS}, got {self.encoding!r}")


@dataclass(frozen=True)
class RecordFile:
    entries: tuple[RecordEntry, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self) -> int:
        return len(self.entries)


def _meta(entry: RecordEntry) -> bytes:
    a = entry.annotation
    meta = {
        "image_id": a.image_id,
        "width": a.width,
        "height": a.height,
        "depth": a.depth,
        "encoding": entry.encoding,
        "objects": [
            {
                "class_id": o.class_id,
                "xmin": o.box.xmin,
                "ymin": o.box.ymin,
                "xmax": o.box.xmax,
                "ymax": o.box.ymax,
                "difficult": o.difficult,
            }
            for o in a.objects
        ],
    }
    return json.dumps(meta, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def write_records(r: RecordFile) -> bytes:
    buf = io.BytesIO()
    dump_records(r, buf)
    return buf.getvalue()


def dump_records(r: RecordFile, fp: BinaryIO) -> None:
    fp.write(HEADER)
    for entry in r.entries:
        meta = _meta(entry)
        fp.write(_U32.pack(len(meta)))
        fp.write(meta)
        fp.write(_U32.pack(len(entry.image)))
        fp.write(entry.image)


def _entry_from_meta(raw: bytes, image: bytes, offset: int) -> RecordEntry:
    try:
        meta = json.loads(raw.decode("utf-8"))
        objects = tuple(
            GroundTruthObject(
                int(o["class_id"]),
                BoundingBox(o["xmin"], o["ymin"], o["xmax"], o["ymax"]),
                bool(o["difficult"]),
            )
            for o in meta["objects"]
        )
        ann = ImageAnnotation(meta["image_id"], meta["width"], meta["height"], meta["depth"], objects)
        return RecordEntry(ann, image, meta["encoding"])
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise ParseError(f"bad record metadata at byte offset {offset}: {e}") from None


def read_records(source: Union[bytes, bytearray, BinaryIO]) -> RecordFile:
    data = bytes(source) if isinstance(source, (bytes, bytearray, memoryview)) else source.read()
    if len(data) < len(HEADER) or data[:4] != MAGIC:
        raise NotARecordFile("missing DREC magic")
    if data[4] != VERSION:
        raise NotARecordFile(f"unsupported DREC version {data[4]}")

    entries = []
    pos = len(HEADER)
    end = len(data)
    while pos < end:
        start = pos
        if pos + 4 > end:
            raise TruncatedRecord(start)
        (meta_len,) = _U32.unpack_from(data, pos)
        pos += 4
        if pos + meta_len + 4 > end:
            raise TruncatedRecord(start)
        meta = data[pos : pos + meta_len]
        pos += meta_len
        (img_len,) = _U32.unpack_from(data, pos)
        pos += 4
        if pos + img_len > end:
            raise TruncatedRecord(start)
        image = data[pos : pos + img_len]
        pos += img_len
        entries.append(_entry_from_meta(meta, image, start))
    return RecordFile(tuple(entries))
