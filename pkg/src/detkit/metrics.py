"""Precision/recall, every-point interpolated AP, mAP, IoU sweeps and LAMR."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import NoClasses, UndefinedMetric
from .formats.annotations import Detection, GroundTruthObject
from .formats.labelmap import LabelMap
from .matching import Candidates, MatchConfig, MatchOutcome, assign, candidates_by_class
from .results import ClassEval, EvalReport, ThresholdResult

LAMR_FLOOR = 1e-10
#: FPPI reference points: 9 values log-spaced over [1e-2, 1].
FPPI_REFERENCE = np.logspace(-2.0, 0.0, num=9)


@dataclass(frozen=True)
class PRPoint:
    recall: float
    precision: float
    cumulative_tp: int
    cumulative_fp: int


@dataclass(frozen=True, eq=False)
class PRCurve:
    """Rank-ordered precision/recall points; arrays share one length."""

    recall: np.ndarray
    precision: np.ndarray
    cum_tp: np.ndarray
    cum_fp: np.ndarray
    n_gt: int

    def __len__(self) -> int:
        return len(self.recall)

    @property
    def points(self) -> list[PRPoint]:
        return [
            PRPoint(float(r), float(p), int(t), int(f))
            for r, p, t, f in zip(self.recall, self.precision, self.cum_tp, self.cum_fp)
        ]


def _tp_array(outcomes: Iterable[MatchOutcome]) -> np.ndarray:
    return np.fromiter((o.tp for o in outcomes), dtype=bool)


def curve_from_tp(tp: np.ndarray, n_gt: int) -> PRCurve:
    tp = np.asarray(tp, dtype=bool)
    cum_tp = np.cumsum(tp, dtype=np.int64)
    cum_fp = np.cumsum(~tp, dtype=np.int64)
    ranks = np.arange(1, len(tp) + 1, dtype=np.int64)
    recall = cum_tp / n_gt if n_gt > 0 else np.zeros(len(tp))
    precision = cum_tp / ranks if len(tp) else np.zeros(0)
    return PRCurve(recall, precision, cum_tp, cum_fp, n_gt)


def pr_curve(outcomes: Sequence[MatchOutcome], n_gt: int) -> PRCurve:
    return curve_from_tp(_tp_array(outcomes), n_gt)


def interpolate_envelope(c: PRCurve) -> PRCurve:
    """Replace each precision with the running maximum taken from the tail."""
    env = np.maximum.accumulate(c.precision[::-1])[::-1] if len(c) else c.precision
    return PRCurve(c.recall, env, c.cum_tp, c.cum_fp, c.n_gt)


def average_precision(c: PRCurve) -> float:
    """Exact area under the interpolated precision/recall step curve."""
    if len(c) == 0 or c.n_gt == 0:
        return 0.0
    env = interpolate_envelope(c).precision
    prev = np.concatenate(([0.0], c.recall[:-1]))
    steps = c.recall > prev
    return float(np.sum((c.recall[steps] - prev[steps]) * env[steps]))


def log_average_miss_rate(outcomes: Sequence[MatchOutcome], n_gt: int, n_images: int) -> float:
    return lamr_from_tp(_tp_array(outcomes), n_gt, n_images)


def lamr_from_tp(tp: np.ndarray, n_gt: int, n_images: int) -> float:
    if n_gt == 0:
        raise UndefinedMetric("miss rate is undefined without ground truth")
    if n_images < 1:
        raise ValueError("n_images must be >= 1")
    tp = np.asarray(tp, dtype=bool)
    cum_tp = np.cumsum(tp, dtype=np.int64)
    cum_fp = np.cumsum(~tp, dtype=np.int64)
    fppi = np.concatenate(([-1.0], cum_fp / n_images))
    miss = np.concatenate(([1.0], 1.0 - cum_tp / n_gt))
    # fppi is non-decreasing, so the greatest rank with fppi <= ref is a bisection
    ranks = np.searchsorted(fppi, FPPI_REFERENCE, side="right") - 1
    samples = np.maximum(miss[ranks], LAMR_FLOOR)
    gm = math.exp(math.fsum(np.log(samples)) / len(samples))
    # a geometric mean lies within [min, max]; clamp away exp/log rounding
    return min(max(gm, float(samples.min())), float(samples.max()))


def tp_fp_counts(outcomes_by_class: Mapping[int, Sequence[MatchOutcome]]) -> dict[int, tuple[int, int]]:
    counts = {}
    for cid, outcomes in outcomes_by_class.items():
        tp = sum(1 for o in outcomes if o.tp)
        counts[cid] = (tp, len(outcomes) - tp)
    return counts


def mean_average_precision(evals: Sequence[ClassEval]) -> float:
    """Unweighted mean AP over classes that have ground truth."""
    if not evals:
        raise NoClasses("no classes to average")
    aps = [e.ap for e in evals if e.n_gt > 0]
    if not aps:
        raise NoClasses("no class has ground truth")
    # exact rational mean, rounded once
    return float(sum(map(Fraction, aps)) / len(aps))


def _class_eval(class_id: int, name: str, tp: np.ndarray, n_gt: int, n_images: int) -> ClassEval:
    curve = curve_from_tp(tp, n_gt)
    n_tp = int(np.count_nonzero(tp))
    lamr = lamr_from_tp(tp, n_gt, n_images) if n_gt > 0 else None
    return ClassEval(class_id, name, average_precision(curve), n_tp, len(tp) - n_tp, n_gt, lamr)


def count_images(dets: Sequence[Detection], gts: Mapping[str, Sequence[GroundTruthObject]]) -> int:
    return len(set(gts) | {d.image_id for d in dets})


def _evaluate_threshold(
    candidates: dict[int, Candidates],
    labels: LabelMap,
    cfg: MatchConfig,
    n_images: int,
) -> ThresholdResult:
    evals = []
    for cid, name in enumerate(labels.classes):
        c = candidates[cid]
        kept, tp = assign(c, cfg)
        evals.append(_class_eval(cid, name, tp[kept], c.n_gt(cfg.exclude_difficult), n_images))
    return ThresholdResult(cfg.iou_threshold, tuple(evals), mean_average_precision(evals))


def iou_sweep(
    dets: Sequence[Detection],
    gts: Mapping[str, Sequence[GroundTruthObject]],
    thresholds: Sequence[float],
    cfg: MatchConfig,
    labels: LabelMap,
    n_images: Optional[int] = None,
) -> EvalReport:
    """Evaluate at ``cfg.iou_threshold`` and at every sweep threshold.

    ``n_images`` defaults to the number of distinct image ids seen in either
    the ground truth or the detections.
    """
    thresholds = [float(t) for t in thresholds]
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("sweep thresholds must be strictly increasing")
    for t in thresholds:
        if not 0.0 < t <= 1.0:
            raise ValueError(f"threshold {t} outside (0, 1]")
    if n_images is None:
        n_images = max(1, count_images(dets, gts))

    candidates = candidates_by_class(dets, gts, len(labels))

    primary = _evaluate_threshold(candidates, labels, cfg, n_images)
    sweep = []
    for t in thresholds:
        if t == cfg.iou_threshold:
            sweep.append(primary)
        else:
            row_cfg = MatchConfig(t, cfg.exclude_difficult, cfg.strict)
            sweep.append(_evaluate_threshold(candidates, labels, row_cfg, n_images))
    return EvalReport(cfg.iou_threshold, primary.classes, primary.map, tuple(sweep))


def evaluate(
    dets: Sequence[Detection],
    gts: Mapping[str, Sequence[GroundTruthObject]],
    labels: LabelMap,
    iou_threshold: float = 0.5,
    sweep: Sequence[float] = (),
    exclude_difficult: bool = False,
) -> EvalReport:
    return iou_sweep(dets, gts, sweep, MatchConfig(iou_threshold, exclude_difficult), labels)
