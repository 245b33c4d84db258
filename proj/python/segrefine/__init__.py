"""Superpixel averaging and CRF refinement of per-pixel class probabilities."""

from segrefine._core import (
    SegrefineError,
    augment_input,
    bridge_weights,
    confusion,
    gen_scene,
    luminance_gradient,
    max_flow,
    median_frequency_weights,
    pixel_accuracy,
    read_label_png,
    read_pmap,
    refine,
    slic,
    srgb_to_lab,
    superpixel_average,
    write_label_png,
    write_pmap,
)

__all__ = [
    "SegrefineError",
    "augment_input",
    "bridge_weights",
    "confusion",
    "gen_scene",
    "luminance_gradient",
    "max_flow",
    "median_frequency_weights",
    "pixel_accuracy",
    "read_label_png",
    "read_pmap",
    "refine",
    "slic",
    "srgb_to_lab",
    "superpixel_average",
    "write_label_png",
    "write_pmap",
]
