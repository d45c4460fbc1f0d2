"""Curve scene-text toolkit: polygon geometry, annotations, suppression,
evaluation protocol, network math references, CLI and labeling server."""

from .geometry import (
    AARect,
    Point,
    Polygon,
    circumscribed_rect,
    intersection_area,
    is_simple,
    polygon_area,
    polygon_iou,
    rect_iou,
)

__all__ = [
    "AARect",
    "Point",
    "Polygon",
    "circumscribed_rect",
    "intersection_area",
    "is_simple",
    "polygon_area",
    "polygon_iou",
    "rect_iou",
]

__version__ = "0.1.0"
