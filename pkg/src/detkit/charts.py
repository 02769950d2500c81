"""Static SVG bar charts for an evaluation report.

Output is plain text built from the report values only, so equal reports
render to identical bytes.
"""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

from .results import EvalReport

_ROW = 28
_BAR = 18
_LABEL_W = 140
_PLOT_W = 420
_VALUE_W = 90
_TOP = 48
_BOTTOM = 28


def _num(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".") if x != int(x) else str(int(x))


def bar_chart(
    title: str,
    categories: Sequence[str],
    series: Sequence[tuple[str, Sequence[float], Sequence[str], str]],
    x_max: float,
) -> str:
    """Horizontal bar chart; ``series`` items are ``(name, values, value_labels, colour)``.

    With more than one series the bars of each category are grouped.
    """
    n_series = len(series)
    group_h = _ROW * n_series
    height = _TOP + group_h * len(categories) + _BOTTOM + (16 * n_series if n_series > 1 else 0)
    width = _LABEL_W + _PLOT_W + _VALUE_W
    scale = _PLOT_W / x_max if x_max > 0 else 0.0
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]
    for ci, cat in enumerate(categories):
        y0 = _TOP + ci * group_h
        out.append(
            f'<text x="{_LABEL_W - 8}" y="{y0 + group_h / 2 + 4:g}" text-anchor="end">{escape(cat)}</text>'
        )
        for si, (_, values, labels, colour) in enumerate(series):
            y = y0 + si * _ROW + (_ROW - _BAR) / 2
            w = max(0.0, values[ci]) * scale
            out.append(
                f'<rect x="{_LABEL_W}" y="{y:g}" width="{w:.2f}" height="{_BAR}" fill="{colour}"/>'
            )
            out.append(
                f'<text x="{_LABEL_W + w + 4:.2f}" y="{y + _BAR - 5:g}">{escape(labels[ci])}</text>'
            )
    axis_y = _TOP + group_h * len(categories)
    out.append(
        f'<line x1="{_LABEL_W}" y1="{axis_y}" x2="{_LABEL_W + _PLOT_W}" y2="{axis_y}" stroke="black"/>'
    )
    out.append(f'<line x1="{_LABEL_W}" y1="{_TOP}" x2="{_LABEL_W}" y2="{axis_y}" stroke="black"/>')
    for k in range(5):
        v = x_max * k / 4
        x = _LABEL_W + v * scale
        out.append(f'<text x="{x:.2f}" y="{axis_y + 16}" text-anchor="middle">{_num(v)}</text>')
    if n_series > 1:
        for si, (name, _, _, colour) in enumerate(series):
            ly = axis_y + _BOTTOM + si * 16
            out.append(f'<rect x="{_LABEL_W}" y="{ly - 10}" width="10" height="10" fill="{colour}"/>')
            out.append(f'<text x="{_LABEL_W + 16}" y="{ly}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_charts(report: EvalReport) -> dict[str, str]:
    """Per-class AP, TP/FP and LAMR charts, keyed by output filename."""
    classes = report.classes
    names = [c.name for c in classes]

    aps = [c.ap for c in classes]
    ap_chart = bar_chart(
        f"mAP = {report.map * 100:.2f}% (IoU {report.iou_threshold:g})",
        names,
        [("AP", [a * 100 for a in aps], [f"{a * 100:.2f}%" for a in aps], "#4682b4")],
        100.0,
    )

    tps, fps = [c.tp for c in classes], [c.fp for c in classes]
    top = max(tps + fps + [1])
    tp_fp_chart = bar_chart(
        "True and false positives per class",
        names,
        [
            ("True positives", tps, [str(v) for v in tps], "#2e8b57"),
            ("False positives", fps, [str(v) for v in fps], "#cd5c5c"),
        ],
        float(top),
    )

    lamrs = [c.lamr for c in classes]
    lamr_chart = bar_chart(
        "Log-average miss rate per class",
        names,
        [
            (
                "LAMR",
                [0.0 if v is None else v for v in lamrs],
                ["n/a" if v is None else f"{v:.2f}" for v in lamrs],
                "#daa520",
            )
        ],
        1.0,
    )
    return {"ap.svg": ap_chart, "tp_fp.svg": tp_fp_chart, "lamr.svg": lamr_chart}
