"""Readers and writers for every on-disk artifact."""

from .annotations import Detection, GroundTruthObject, ImageAnnotation
from .labelmap import NAIRA_CLASSES, NAIRA_LABELS, LabelMap, parse_labelmap, write_labelmap
from .records import RecordEntry, RecordFile, dump_records, read_records, write_records
from .report import parse_report, report_to_csv, write_report
from .textfiles import (
    parse_det_file,
    parse_gt_file,
    read_det_dir,
    read_gt_dir,
    write_det_file,
    write_gt_file,
)
from .voc import parse_voc_annotation, read_object_names, write_voc_annotation

__all__ = [
    "Detection",
    "GroundTruthObject",
    "ImageAnnotation",
    "LabelMap",
    "NAIRA_CLASSES",
    "NAIRA_LABELS",
    "RecordEntry",
    "RecordFile",
    "dump_records",
    "parse_det_file",
    "parse_gt_file",
    "parse_labelmap",
    "parse_report",
    "parse_voc_annotation",
    "read_det_dir",
    "read_gt_dir",
    "read_object_names",
    "read_records",
    "report_to_csv",
    "write_det_file",
    "write_gt_file",
    "write_labelmap",
    "write_records",
    "write_report",
    "write_voc_annotation",
]
