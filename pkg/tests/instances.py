"""Seeded random detection problems for oracle comparisons."""

from __future__ import annotations

import numpy as np

from detkit.formats import Detection, GroundTruthObject
from detkit.geometry import BoundingBox


def random_box(rng, size=64, min_side=1, max_side=40):
    w = int(rng.integers(min_side, max_side + 1))
    h = int(rng.integers(min_side, max_side + 1))
    x0 = int(rng.integers(0, size - w + 1))
    y0 = int(rng.integers(0, size - h + 1))
    return BoundingBox(x0, y0, x0 + w - 1, y0 + h - 1)


def jitter(rng, box, scale, size=64):
    v = np.array(box.as_tuple(), dtype=float) + rng.normal(0, scale, 4)
    x0, y0 = (int(np.clip(round(c), 0, size - 1)) for c in v[:2])
    x1 = int(np.clip(round(v[2]), x0, size - 1))
    y1 = int(np.clip(round(v[3]), y0, size - 1))
    return BoundingBox(x0, y0, x1, y1)


def random_instance(
    rng, n_images=5, n_classes=1, max_gt=20, max_det=50, difficult_rate=0.0, conf_levels=None, min_gt=0
):
    """Ground truth plus detections that are jittered copies, duplicates or noise.

    ``conf_levels`` quantises confidences to force ties.
    """
    images = [f"im{i}" for i in range(n_images)]
    gts = {im: [] for im in images}
    for _ in range(int(rng.integers(min_gt, max_gt + 1))):
        im = images[int(rng.integers(n_images))]
        gts[im].append(
            GroundTruthObject(int(rng.integers(n_classes)), random_box(rng), bool(rng.random() < difficult_rate))
        )
    all_gt = [(im, g) for im in images for g in gts[im]]
    dets = []
    for _ in range(int(rng.integers(0, max_det + 1))):
        if all_gt and rng.random() < 0.7:
            im, g = all_gt[int(rng.integers(len(all_gt)))]
            box, cid = jitter(rng, g.box, float(rng.choice([0.5, 2.0, 5.0]))), g.class_id
        else:
            im, box, cid = images[int(rng.integers(n_images))], random_box(rng), int(rng.integers(n_classes))
        conf = float(rng.random())
        if conf_levels:
            conf = round(conf * conf_levels) / conf_levels
        dets.append(Detection(im, cid, conf, box))
    return dets, gts


def oracle_view(dets, gts, class_id=0):
    """Plain-tuple form accepted by :mod:`oracles`."""
    d = [(x.image_id, x.confidence, x.box.as_tuple()) for x in dets if x.class_id == class_id]
    g = {
        im: [(o.box.as_tuple(), o.difficult) for o in objs if o.class_id == class_id]
        for im, objs in gts.items()
    }
    return d, {im: objs for im, objs in g.items() if objs}


def random_events(rng, n=1000, labels=("10 Naira", "20 Naira", "50 Naira"), max_gap=1500):
    """Time-ordered (t_ms, label, conf) triples; gaps of 0 are allowed."""
    t, out = 0, []
    for _ in range(n):
        t += int(rng.integers(0, max_gap + 1))
        out.append((t, labels[int(rng.integers(len(labels)))], round(float(rng.random()), 3)))
    return out
