"""Dataset management and evaluation tools for object detection."""

from .geometry import BoundingBox, area, iou, transform_box
from .matching import MatchConfig, MatchOutcome, match_class
from .metrics import average_precision, evaluate, iou_sweep, log_average_miss_rate, mean_average_precision
from .results import ClassEval, EvalReport

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "ClassEval",
    "EvalReport",
    "MatchConfig",
    "MatchOutcome",
    "area",
    "average_precision",
    "evaluate",
    "iou",
    "iou_sweep",
    "log_average_miss_rate",
    "match_class",
    "mean_average_precision",
    "transform_box",
]
