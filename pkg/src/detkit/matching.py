"""Greedy, confidence-ordered assignment of detections to ground truth.

Detections of one class are ranked by confidence (descending) with a
content-derived tie-break, so the result never depends on input order.
Each detection's *candidate* is the max-IoU ground-truth object in its
image; that mapping does not depend on the IoU threshold, which is why it
is computed once (:func:`find_candidates`) and reused by every threshold
of a sweep (:func:`assign`).
"""

from __future__ import annotations

from collections import abc
from dataclasses import dataclass
from itertools import chain
from operator import attrgetter
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import ClassMixture
from .formats.annotations import Detection, GroundTruthObject


@dataclass(frozen=True)
class MatchConfig:
    iou_threshold: float = 0.5
    exclude_difficult: bool = False
    strict: bool = False  # use IoU > threshold instead of >=

    def __post_init__(self):
        if not 0.0 < self.iou_threshold <= 1.0:
            raise ValueError(f"iou_threshold must be in (0, 1], got {self.iou_threshold}")


@dataclass(frozen=True, slots=True)
class MatchOutcome:
    detection: Detection
    tp: bool
    matched_gt: Optional[tuple[str, int]] = None  # (image_id, index in that image's list)
    iou: Optional[float] = None

    @property
    def verdict(self) -> str:
        return "TP" if self.tp else "FP"


def rank_key(d: Detection):
    b = d.box
    return (-d.confidence, d.image_id, b.xmin, b.ymin, b.xmax, b.ymax)


@dataclass
class Candidates:
    """Threshold-independent matching state for one class.

    Arrays are aligned with ``detections`` (rank order). ``gt_key`` is -1
    when the detection's image has no ground truth of this class.
    """

    source: Sequence[Detection]  # input order
    order: np.ndarray  # rank -> index into ``source``
    gt_key: np.ndarray
    iou: np.ndarray
    difficult: np.ndarray
    gt_refs: Sequence[tuple[str, int]]
    gt_difficult: np.ndarray

    def __len__(self) -> int:
        return len(self.order)

    @property
    def detections(self) -> list[Detection]:
        return [self.source[i] for i in self.order]

    def n_gt(self, exclude_difficult: bool = False) -> int:
        if exclude_difficult:
            return int(np.count_nonzero(~self.gt_difficult))
        return len(self.gt_refs)


def _ensure_single_class(dets: Sequence[Detection], gts: Mapping[str, Sequence[GroundTruthObject]]):
    classes = {d.class_id for d in dets}
    for objs in gts.values():
        classes.update(o.class_id for o in objs)
    if len(classes) > 1:
        raise ClassMixture(f"expected a single class, got {sorted(classes)}")


_corners = attrgetter("xmin", "ymin", "xmax", "ymax")


def _coords(boxes, n: int) -> np.ndarray:
    return np.fromiter(chain.from_iterable(map(_corners, boxes)), dtype=np.int64, count=4 * n).reshape(n, 4)


@dataclass
class _GroundTruthLayout:
    """One class's ground truth, concatenated in image order."""

    start: np.ndarray  # per image rank
    count: np.ndarray
    boxes: np.ndarray  # (n, 4)
    refs: Sequence[tuple[str, int]]
    difficult: np.ndarray


class _Refs(abc.Sequence):
    """``(image_id, index)`` per ground-truth object, built on access."""

    def __init__(self, names: Sequence[str], image: np.ndarray, index: np.ndarray):
        self._names, self._image, self._index = names, image, index

    def __len__(self) -> int:
        return len(self._index)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(len(self)))]
        return self._names[self._image[k]], int(self._index[k])


def _layouts(
    gts: Mapping[str, Sequence[GroundTruthObject]],
    image_rank: Mapping[str, int],
) -> dict[int, _GroundTruthLayout]:
    """Per-class layouts; ``image_rank`` must cover every key of ``gts`` and be in rank order."""
    image_ids = sorted(gts)
    objs = [o for im in image_ids for o in gts[im]]
    n = len(objs)
    ranks = np.fromiter(map(image_rank.__getitem__, image_ids), dtype=np.int64, count=len(image_ids))
    img = np.repeat(ranks, [len(gts[im]) for im in image_ids])
    cls = np.fromiter(map(attrgetter("class_id"), objs), dtype=np.int64, count=n)
    boxes = _coords(map(attrgetter("box"), objs), n)
    difficult = np.fromiter(map(attrgetter("difficult"), objs), dtype=bool, count=n)
    names = list(image_rank)
    out = {}
    for cid in np.unique(cls):
        # order within the class is image rank, then file order
        sel = np.flatnonzero(cls == cid)
        g_img = img[sel]
        count = np.bincount(g_img, minlength=len(names))
        start = np.cumsum(count) - count
        within = np.arange(len(sel)) - start[g_img]
        refs = _Refs(names, g_img, within)
        out[int(cid)] = _GroundTruthLayout(start, count, boxes[sel], refs, difficult[sel])
    return out


def _empty_layout(n_images: int) -> _GroundTruthLayout:
    zeros = np.zeros(n_images, dtype=np.int64)
    return _GroundTruthLayout(zeros, zeros, np.zeros((0, 4), dtype=np.int64), [], np.zeros(0, dtype=bool))


def _match(
    source: Sequence[Detection],
    index: np.ndarray,
    conf: np.ndarray,
    img: np.ndarray,
    boxes: np.ndarray,
    gt: _GroundTruthLayout,
) -> Candidates:
    """Candidates for the detections ``source[index]``; column arrays align with ``index``."""
    n = len(index)
    x0, y0, x1, y1 = boxes.T
    # same ordering as rank_key; lexsort is stable and takes the primary key last
    order = np.lexsort((y1, x1, y0, x0, img, -conf))
    img, x0, y0, x1, y1 = img[order], x0[order], y0[order], x1[order], y1[order]
    gx0, gy0, gx1, gy1 = gt.boxes.T
    g_area = (gx1 - gx0 + 1) * (gy1 - gy0 + 1)

    # every (detection, ground truth in the same image) pair, grouped by detection
    counts = gt.count[img]
    n_pairs = int(counts.sum())
    pair_det = np.repeat(np.arange(n), counts)
    seg_start = np.cumsum(counts) - counts
    gi = np.repeat(gt.start[img], counts) + (np.arange(n_pairs) - np.repeat(seg_start, counts))
    px0, py0, px1, py1 = x0[pair_det], y0[pair_det], x1[pair_det], y1[pair_det]
    iw = np.minimum(px1, gx1[gi]) - np.maximum(px0, gx0[gi]) + 1
    ih = np.minimum(py1, gy1[gi]) - np.maximum(py0, gy0[gi]) + 1
    inter = np.where((iw > 0) & (ih > 0), iw * ih, 0)
    union = (px1 - px0 + 1) * (py1 - py0 + 1) + g_area[gi] - inter
    # int64 -> float64 is exact here, so the quotient rounds exactly like int / int
    pair_iou = inter / union

    gt_key = np.full(n, -1, dtype=np.int64)
    best_iou = np.zeros(n, dtype=np.float64)
    has = counts > 0
    if n_pairs:
        starts = seg_start[has]
        seg_max = np.maximum.reduceat(pair_iou, starts)
        # first pair reaching the maximum: ties keep the lowest ground-truth index
        at_max = pair_iou == np.repeat(seg_max, counts[has])
        first = np.minimum.reduceat(np.where(at_max, np.arange(n_pairs), n_pairs), starts)
        gt_key[has] = gi[first]
        best_iou[has] = seg_max

    difficult = np.zeros(n, dtype=bool)
    difficult[has] = gt.difficult[gt_key[has]]
    return Candidates(source, index[order], gt_key, best_iou, difficult, gt.refs, gt.difficult)


def _rank_images(gts: Mapping[str, object], image_ids: Sequence[str]) -> dict[str, int]:
    # ranks keep the string order of the image_id tie-break
    return {im: r for r, im in enumerate(sorted(set(gts).union(image_ids)))}


_det_fields = attrgetter("class_id", "confidence", "box.xmin", "box.ymin", "box.xmax", "box.ymax")


def _columns(dets: Sequence[Detection], image_rank: Mapping[str, int], ids: Sequence[str]):
    """(class_id, confidence, image rank, (n, 4) boxes), reading each detection once."""
    n = len(dets)
    # float64 holds the integer fields exactly
    a = np.fromiter(chain.from_iterable(map(_det_fields, dets)), dtype=np.float64, count=6 * n).reshape(n, 6)
    img = np.fromiter(map(image_rank.__getitem__, ids), dtype=np.int64, count=n)
    return a[:, 0].astype(np.int64), a[:, 1].copy(), img, a[:, 2:].astype(np.int64)


def find_candidates(
    dets: Sequence[Detection],
    gts: Mapping[str, Sequence[GroundTruthObject]],
) -> Candidates:
    _ensure_single_class(dets, gts)
    ids = list(map(attrgetter("image_id"), dets))
    image_rank = _rank_images(gts, ids)
    _, conf, img, boxes = _columns(dets, image_rank, ids)
    layouts = _layouts(gts, image_rank)
    layout = next(iter(layouts.values())) if layouts else _empty_layout(len(image_rank))
    return _match(dets, np.arange(len(dets)), conf, img, boxes, layout)


def candidates_by_class(
    dets: Sequence[Detection],
    gts: Mapping[str, Sequence[GroundTruthObject]],
    n_classes: int,
) -> dict[int, Candidates]:
    """``find_candidates`` for every class id below ``n_classes``, reading each detection once."""
    ids = list(map(attrgetter("image_id"), dets))
    image_rank = _rank_images(gts, ids)
    cls, conf, img, boxes = _columns(dets, image_rank, ids)
    bad = (cls < 0) | (cls >= n_classes)
    if bad.any():
        raise ValueError(f"detection class id {int(cls[bad][0])} not in label map")
    layouts = _layouts(gts, image_rank)
    unknown = set(layouts) - set(range(n_classes))
    if unknown:
        raise ValueError(f"class ids {sorted(unknown)} not in label map")

    out = {}
    for cid in range(n_classes):
        sel = np.flatnonzero(cls == cid)
        layout = layouts.get(cid) or _empty_layout(len(image_rank))
        out[cid] = _match(dets, sel, conf[sel], img[sel], boxes[sel], layout)
    return out


def assign(c: Candidates, cfg: MatchConfig) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(kept, tp)`` boolean arrays in rank order.

    A detection is TP when its candidate clears the threshold and no
    higher-ranked detection has already claimed that candidate. With
    ``exclude_difficult``, detections whose candidate is a difficult object
    clearing the threshold are not kept at all.
    """
    t = cfg.iou_threshold
    has = c.gt_key >= 0
    eligible = has & ((c.iou > t) if cfg.strict else (c.iou >= t))
    kept = np.ones(len(c), dtype=bool)
    if cfg.exclude_difficult:
        dropped = eligible & c.difficult
        kept = ~dropped
        eligible = eligible & ~c.difficult
    tp = np.zeros(len(c), dtype=bool)
    idx = np.flatnonzero(eligible)
    if idx.size:
        _, first = np.unique(c.gt_key[idx], return_index=True)
        tp[idx[first]] = True
    return kept, tp


def match_class(
    dets: Sequence[Detection],
    gts: Mapping[str, Sequence[GroundTruthObject]],
    cfg: MatchConfig,
) -> list[MatchOutcome]:
    c = find_candidates(dets, gts)
    kept, tp = assign(c, cfg)
    outcomes = []
    for k, d in enumerate(c.detections):
        if not kept[k]:
            continue
        if tp[k]:
            outcomes.append(MatchOutcome(d, True, c.gt_refs[c.gt_key[k]], float(c.iou[k])))
        else:
            outcomes.append(MatchOutcome(d, False))
    return outcomes


def split_by_class(
    dets: Sequence[Detection],
    gts: Mapping[str, Sequence[GroundTruthObject]],
) -> dict[int, tuple[list[Detection], dict[str, list[GroundTruthObject]]]]:
    """Group detections and per-image ground truth by class id."""
    out: dict[int, tuple[list[Detection], dict[str, list[GroundTruthObject]]]] = {}
    for d in dets:
        out.setdefault(d.class_id, ([], {}))[0].append(d)
    for image_id, objs in gts.items():
        for o in objs:
            out.setdefault(o.class_id, ([], {}))[1].setdefault(image_id, []).append(o)
    return out


def match_all(
    dets: Sequence[Detection],
    gts: Mapping[str, Sequence[GroundTruthObject]],
    cfg: MatchConfig,
) -> dict[int, list[MatchOutcome]]:
    return {cid: match_class(d, g, cfg) for cid, (d, g) in sorted(split_by_class(dets, gts).items())}
