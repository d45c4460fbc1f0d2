"""Detection post-processing: non-polygon suppression and polygonal NMS.

NPS drops detections whose polygon has intersecting sides; such shapes are
almost never real text and cannot be scored by polygon overlap. PNMS is the
classic greedy score-ordered suppression with the overlap metric switched to
exact polygon IoU; the rectangle mode falls back to axis-aligned IoU of the
circumscribed rectangles. A detection whose overlap EQUALS the threshold
survives (strict comparison), and score ties keep input order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .annotations import Detection
from .errors import NonSimpleInput
from .geometry import circumscribed_rect, is_simple, polygon_iou, rect_iou


class OverlapMode(enum.Enum):
    PNMS = "pnms"
    RECT_NMS = "rect_nms"


@dataclass(frozen=True)
class SuppressionConfig:
    pnms_threshold: float = 0.1
    mode: OverlapMode = OverlapMode.PNMS

    def __post_init__(self) -> None:
        if not 0.0 <= self.pnms_threshold <= 1.0:
            raise ValueError(f"threshold {self.pnms_threshold} outside [0, 1]")


def nps(dets: Sequence[Detection]) -> list[Detection]:
    """Keep only detections with a simple polygon; order preserved."""
    return [d for d in dets if is_simple(d.polygon)]


def pnms(dets: Sequence[Detection], cfg: SuppressionConfig) -> list[Detection]:
    """Greedy non-maximum suppression over polygon (or rectangle) overlap.

    Detections are visited by descending score (ties by input order); each
    kept detection removes every remaining one whose overlap with it exceeds
    the threshold. All polygons must be simple; run nps first.
    """
    for d in dets:
        if not is_simple(d.polygon):
            raise NonSimpleInput("pnms input contains a non-simple polygon")
    order = sorted(range(len(dets)), key=lambda i: -dets[i].score)
    if cfg.mode is OverlapMode.RECT_NMS:
        rects = [circumscribed_rect(d.polygon) for d in dets]

        def overlap(i, j):
            return rect_iou(rects[i], rects[j])
    else:
        def overlap(i, j):
            return polygon_iou(dets[i].polygon, dets[j].polygon)

    kept: list[int] = []
    remaining = order
    while remaining:
        top = remaining[0]
        kept.append(top)
        remaining = [
            i for i in remaining[1:] if overlap(top, i) <= cfg.pnms_threshold
        ]
    return [dets[i] for i in kept]
