"""Dataset lifecycle tooling: validate, split, augment, resize, pack."""

from .augment import AugmentedVariant, AugmentOp, AugmentPlan, augment, parse_ops, variant_image_id
from .images import ImageRaster, decode_image, encode_image, resize_raster, resize_with_boxes
from .split import SplitSpec, apportion, keyed_rng, split_dataset
from .tools import (
    Finding,
    ValidationReport,
    collect_pairs,
    generate_labelmap,
    labelmap_from_names,
    list_annotations,
    list_images,
    pack_records,
    validate_dataset,
    validate_records,
)

__all__ = [
    "AugmentOp",
    "AugmentPlan",
    "AugmentedVariant",
    "Finding",
    "ImageRaster",
    "SplitSpec",
    "ValidationReport",
    "apportion",
    "augment",
    "collect_pairs",
    "decode_image",
    "encode_image",
    "generate_labelmap",
    "keyed_rng",
    "labelmap_from_names",
    "list_annotations",
    "list_images",
    "pack_records",
    "parse_ops",
    "resize_raster",
    "resize_with_boxes",
    "split_dataset",
    "validate_dataset",
    "validate_records",
    "variant_image_id",
]
