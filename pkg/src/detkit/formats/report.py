"""JSON and CSV serialization of :class:`~detkit.results.EvalReport`.

Ratios are written with exactly six fractional digits and keys in a fixed
order, so equal reports always serialize to identical bytes.
"""

from __future__ import annotations

import csv
import io
import json

from ..errors import ParseError
from ..results import ClassEval, EvalReport, ThresholdResult


def fmt_ratio(x: float) -> str:
    return f"{x:.6f}"


def fmt_threshold(x: float) -> str:
    """Short threshold label: ``0.55``, ``0.50``, ``0.525``."""
    s = f"{x:.6f}".rstrip("0")
    whole, _, frac = s.partition(".")
    return f"{whole}.{frac.ljust(2, '0')}"


def _json_str(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def _class_json(c: ClassEval) -> str:
    lamr = "null" if c.lamr is None else fmt_ratio(c.lamr)
    return (
        "{"
        f'"name": {_json_str(c.name)}, "ap": {fmt_ratio(c.ap)}, "tp": {c.tp}, '
        f'"fp": {c.fp}, "n_gt": {c.n_gt}, "lamr": {lamr}'
        "}"
    )


def write_report(report: EvalReport) -> bytes:
    lines = ["{", f'  "iou_threshold": {fmt_ratio(report.iou_threshold)},']
    if report.classes:
        lines.append('  "classes": [')
        lines.append(",\n".join("    " + _class_json(c) for c in report.classes))
        lines.append("  ],")
    else:
        lines.append('  "classes": [],')
    lines.append(f'  "map": {fmt_ratio(report.map)},')
    if report.sweep:
        lines.append('  "sweep": [')
        lines.append(
            ",\n".join(
                f'    {{"threshold": {fmt_ratio(r.threshold)}, "map": {fmt_ratio(r.map)}}}' for r in report.sweep
            )
        )
        lines.append("  ]")
    else:
        lines.append('  "sweep": []')
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_report(data: bytes) -> EvalReport:
    """Inverse of :func:`write_report`. Class ids follow list order."""
    try:
        obj = json.loads(data.decode("utf-8"))
        classes = tuple(
            ClassEval(
                i,
                c["name"],
                float(c["ap"]),
                int(c["tp"]),
                int(c["fp"]),
                int(c["n_gt"]),
                None if c["lamr"] is None else float(c["lamr"]),
            )
            for i, c in enumerate(obj["classes"])
        )
        sweep = tuple(ThresholdResult(float(r["threshold"]), (), float(r["map"])) for r in obj["sweep"])
        return EvalReport(float(obj["iou_threshold"]), classes, float(obj["map"]), sweep)
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise ParseError(f"not a valid report: {e}") from None


def report_to_csv(report: EvalReport) -> bytes:
    """Two CSV tables separated by a blank line: per-class rows, then sweep rows.

    The ``map_pct`` column is the Table-style percentage with two decimals.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["class", "ap", "tp", "fp", "n_gt", "lamr"])
    for c in report.classes:
        w.writerow([c.name, fmt_ratio(c.ap), c.tp, c.fp, c.n_gt, "" if c.lamr is None else fmt_ratio(c.lamr)])
    buf.write("\n")
    w.writerow(["threshold", "map", "map_pct"])
    for r in report.sweep:
        w.writerow([fmt_threshold(r.threshold), fmt_ratio(r.map), f"{r.map * 100:.2f}%"])
    return buf.getvalue().encode("utf-8")
