"""Evaluation result records produced by :mod:`detkit.metrics`."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class ClassEval:
    class_id: int
    name: str
    ap: float
    tp: int
    fp: int
    n_gt: int
    lamr: Optional[float]  # None when the class has no ground truth


@dataclass(frozen=True)
class ThresholdResult:
    threshold: float
    classes: tuple[ClassEval, ...]
    map: float


@dataclass(frozen=True)
class EvalReport:
    iou_threshold: float
    classes: tuple[ClassEval, ...]
    map: float
    sweep: tuple[ThresholdResult, ...] = ()

    def __post_init__(self):
        thresholds = [row.threshold for row in self.sweep]
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise ValueError("sweep thresholds must be strictly increasing")
