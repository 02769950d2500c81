"""``detkit`` command line: thin wrappers over the library.

Exit status is 0 on success, 1 on validation findings or bad input data,
and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path

from . import audio, charts
from .dataset import (
    AugmentPlan,
    SplitSpec,
    augment,
    collect_pairs,
    decode_image,
    encode_image,
    generate_labelmap,
    list_annotations,
    list_images,
    pack_records,
    parse_ops,
    resize_with_boxes,
    split_dataset,
    validate_dataset,
)
from .errors import DetkitError
from .formats import (
    LabelMap,
    parse_labelmap,
    parse_report,
    parse_voc_annotation,
    read_det_dir,
    read_gt_dir,
    report_to_csv,
    write_labelmap,
    write_records,
    write_report,
    write_voc_annotation,
)
from .metrics import evaluate

log = logging.getLogger("detkit")


@dataclass(frozen=True)
class SweepSpec:
    start: Decimal
    stop: Decimal
    step: Decimal

    def __post_init__(self):
        if not (0 < self.start <= self.stop <= 1):
            raise ValueError("sweep needs 0 < start <= stop <= 1")
        if self.step <= 0:
            raise ValueError("sweep step must be positive")
        n = (self.stop - self.start) / self.step
        if abs(n - n.to_integral_value()) > Decimal("1e-9"):
            raise ValueError("(stop - start) / step must be a whole number")

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected START:STOP:STEP, got {text!r}")
        try:
            return cls(*(Decimal(p) for p in parts))
        except InvalidOperation:
            raise ValueError(f"non-numeric sweep {text!r}") from None

    def thresholds(self) -> list[float]:
        n = int(((self.stop - self.start) / self.step).to_integral_value())
        return [float(self.start + i * self.step) for i in range(n + 1)]


def _sweep_arg(text: str) -> SweepSpec:
    try:
        return SweepSpec.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _ratio(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{v} outside [0, 1]")
    return v


def _read_labels(path) -> LabelMap:
    return parse_labelmap(Path(path).read_text(encoding="utf-8"))


def _write(path: Path, data: bytes | str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    path.write_bytes(data)


def cmd_validate(args) -> int:
    report = validate_dataset(args.images, args.annotations, _read_labels(args.labels))
    sys.stdout.write(report.summary())
    return 0 if report.ok else 1


def cmd_labelmap(args) -> int:
    labels = generate_labelmap(args.annotations)
    _write(Path(args.out), write_labelmap(labels))
    return 0


def cmd_split(args) -> int:
    ids = [line.strip() for line in Path(args.ids).read_text(encoding="utf-8").splitlines() if line.strip()]
    spec = SplitSpec(args.train, args.val, args.test, args.seed)
    out = Path(args.out_dir)
    for name, part in zip(("train", "val", "test"), split_dataset(ids, spec)):
        _write(out / f"{name}.txt", "".join(i + "\n" for i in part))
    return 0


def cmd_augment(args) -> int:
    labels = _read_labels(args.labels) if args.labels else generate_labelmap(args.annotations)
    plan = AugmentPlan(parse_ops(args.ops), args.variants, args.seed)
    images = list_images(args.images)
    out = Path(args.out_dir)
    empty = 0
    for stem, ann_path in list_annotations(args.annotations).items():
        if stem not in images:
            log.warning("%s: no image, skipped", stem)
            continue
        ann = parse_voc_annotation(ann_path.read_bytes(), labels)
        raster, _ = decode_image(images[stem].read_bytes(), images[stem])
        outputs = [(raster, ann)] if args.include_originals else []
        for variant in augment(raster, ann, plan):
            empty += variant.empty
            outputs.append((variant.image, variant.annotation))
        for img, a in outputs:
            if args.resize:
                img, a = resize_with_boxes(img, a, args.resize)
            _write(out / "images" / f"{a.image_id}.png", encode_image(img, "png"))
            _write(out / "annotations" / f"{a.image_id}.xml", write_voc_annotation(a, labels))
    if empty:
        log.warning("%d variant(s) lost every box", empty)
    return 0


def cmd_pack(args) -> int:
    labels = _read_labels(args.labels)
    records = pack_records(collect_pairs(args.images, args.annotations, labels), labels)
    _write(Path(args.out), write_records(records))
    return 0


def cmd_evaluate(args) -> int:
    labels = _read_labels(args.labels)
    gts = read_gt_dir(args.gt, labels)
    dets = read_det_dir(args.det, labels)
    sweep = args.sweep.thresholds() if args.sweep else []
    report = evaluate(dets, gts, labels, args.iou, sweep, exclude_difficult=args.voc_difficult)
    _write(Path(args.out), write_report(report))
    sys.stdout.write(f"mAP@{args.iou:g} = {report.map * 100:.2f}%\n")
    for row in report.sweep:
        sys.stdout.write(f"  {row.threshold:.2f}\t{row.map * 100:.2f}%\n")
    return 0


def cmd_report(args) -> int:
    report = parse_report(Path(args.input).read_bytes())
    out = Path(args.out_dir)
    if args.format == "csv":
        _write(out / "report.csv", report_to_csv(report))
    else:
        for name, svg in charts.render_charts(report).items():
            _write(out / name, svg)
    return 0


def cmd_audio_dispatch(args) -> int:
    labels = _read_labels(args.labels)
    manifest = audio.load_manifest(args.audio_dir, labels)
    events = audio.parse_events(Path(args.events).read_text(encoding="utf-8"))
    policy = audio.DispatchPolicy(args.min_conf, args.cooldown_ms)
    _write(Path(args.out), audio.write_commands(audio.dispatch(events, manifest, policy)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="detkit", description="Object-detection dataset and evaluation tools.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("validate", help="check images and VOC annotations for consistency")
    s.add_argument("--images", required=True)
    s.add_argument("--annotations", required=True)
    s.add_argument("--labels", required=True)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("labelmap", help="build labelmap.txt from VOC annotations")
    s.add_argument("--annotations", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_labelmap)

    s = sub.add_parser("split", help="seeded train/val/test split of image ids")
    s.add_argument("--ids", required=True, help="file with one image id per line")
    s.add_argument("--train", type=_ratio, required=True)
    s.add_argument("--val", type=_ratio, required=True)
    s.add_argument("--test", type=_ratio, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("augment", help="write seeded, box-aware augmented variants")
    s.add_argument("--images", required=True)
    s.add_argument("--annotations", required=True)
    s.add_argument("--ops", required=True, help="e.g. 'hflip@0.5,rot90@0.25,brightness=-30:30'")
    s.add_argument("--variants", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out-dir", required=True)
    s.add_argument("--labels", help="label map (default: generated from the annotations)")
    s.add_argument("--include-originals", action="store_true")
    s.add_argument("--resize", type=int, metavar="N", help="resize every output to N x N")
    s.set_defaults(func=cmd_augment)

    s = sub.add_parser("pack", help="pack images and annotations into a DREC container")
    s.add_argument("--images", required=True)
    s.add_argument("--annotations", required=True)
    s.add_argument("--labels", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_pack)

    s = sub.add_parser("evaluate", help="AP/mAP/LAMR from ground_truth and detection_results dirs")
    s.add_argument("--gt", required=True)
    s.add_argument("--det", required=True)
    s.add_argument("--labels", required=True)
    s.add_argument("--iou", type=_ratio, required=True)
    s.add_argument("--sweep", type=_sweep_arg, metavar="A:B:S")
    s.add_argument("--voc-difficult", action="store_true", help="ignore objects flagged difficult")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("report", help="render a report as CSV or SVG charts")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--format", choices=("csv", "svg"), required=True)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("audio-dispatch", help="map detection events to audio playback commands")
    s.add_argument("--events", required=True)
    s.add_argument("--audio-dir", required=True)
    s.add_argument("--labels", required=True)
    s.add_argument("--min-conf", type=_ratio, default=0.5)
    s.add_argument("--cooldown-ms", type=int, default=2000)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_audio_dispatch)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "iou", None) is not None and args.iou == 0:
        parser.error("--iou must be in (0, 1]")
    try:
        return args.func(args)
    except (DetkitError, ValueError, OSError) as e:
        print(f"detkit {args.command}: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
