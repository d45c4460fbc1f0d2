"""Regression-target codec for the 14 polygon points and their rectangle.

Point targets are per-point deltas between the ground-truth vertex (measured
from the min corner of its own circumscribed rectangle) and the proposal's
reference point (measured from the proposal rectangle's min corner),
normalized by the proposal rectangle's width/height. A polygon proposal
contributes only through its circumscribed rectangle, whose 14 reference
points are its long-side interpolation, so encode/decode are total and agree
with the annotation lifting. Rectangle targets use the usual center-offset /
log-size box parameterization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .annotations import interpolate_quad
from .errors import DegenerateProposal
from .geometry import AARect, Point, Polygon, circumscribed_rect

MIN_PROPOSAL_SIDE = 1.0  # pixels


@dataclass(frozen=True)
class OffsetTargets:
    dx: np.ndarray          # 14 normalized horizontal point deltas
    dy: np.ndarray          # 14 normalized vertical point deltas
    rect_deltas: np.ndarray  # (tx, ty, tw, th) against the proposal rectangle

    def __post_init__(self) -> None:
        dx = np.asarray(self.dx, dtype=np.float64)
        dy = np.asarray(self.dy, dtype=np.float64)
        rd = np.asarray(self.rect_deltas, dtype=np.float64)
        if dx.shape != (14,) or dy.shape != (14,):
            raise ValueError("point deltas must have shape (14,)")
        if rd.shape != (4,):
            raise ValueError("rect deltas must have shape (4,)")
        if not (np.isfinite(dx).all() and np.isfinite(dy).all() and np.isfinite(rd).all()):
            raise ValueError("targets must be finite")
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "dy", dy)
        object.__setattr__(self, "rect_deltas", rd)


def _as_rect(proposal: Polygon | AARect) -> AARect:
    rect = circumscribed_rect(proposal) if isinstance(proposal, Polygon) else proposal
    if rect.width < MIN_PROPOSAL_SIDE or rect.height < MIN_PROPOSAL_SIDE:
        raise DegenerateProposal(f"proposal rectangle {rect} narrower than one pixel")
    return rect


def reference_points(rect: AARect) -> Polygon:
    """The 14 reference points of a rectangle proposal (long-side interpolation)."""
    return interpolate_quad(rect.corners())


def encode(gt: Polygon, proposal: Polygon | AARect) -> OffsetTargets:
    """Targets that move the proposal's reference points onto the ground truth."""
    if len(gt) != 14:
        raise ValueError("ground truth must have 14 vertices")
    prect = _as_rect(proposal)
    grect = circumscribed_rect(gt)
    refs = reference_points(prect).vertices
    dx = np.empty(14)
    dy = np.empty(14)
    for i, (g, p) in enumerate(zip(gt.vertices, refs)):
        gt_off_x = g.x - grect.x_min
        gt_off_y = g.y - grect.y_min
        prop_off_x = p.x - prect.x_min
        prop_off_y = p.y - prect.y_min
        dx[i] = (gt_off_x - prop_off_x) / prect.width
        dy[i] = (gt_off_y - prop_off_y) / prect.height
    px_ctr = prect.x_min + 0.5 * prect.width
    py_ctr = prect.y_min + 0.5 * prect.height
    gx_ctr = grect.x_min + 0.5 * grect.width
    gy_ctr = grect.y_min + 0.5 * grect.height
    rect_deltas = np.array([
        (gx_ctr - px_ctr) / prect.width,
        (gy_ctr - py_ctr) / prect.height,
        math.log(grect.width / prect.width),
        math.log(grect.height / prect.height),
    ])
    return OffsetTargets(dx, dy, rect_deltas)


def decode_rect(t: OffsetTargets, proposal: AARect) -> AARect:
    """Refined circumscribed rectangle implied by the rectangle deltas."""
    prect = _as_rect(proposal)
    tx, ty, tw, th = t.rect_deltas
    cx = tx * prect.width + prect.x_min + 0.5 * prect.width
    cy = ty * prect.height + prect.y_min + 0.5 * prect.height
    w = math.exp(tw) * prect.width
    h = math.exp(th) * prect.height
    return AARect(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h)


def decode(t: OffsetTargets, proposal: AARect) -> Polygon:
    """Reconstruct the 14 vertices from targets and the proposal rectangle.

    Denormalization uses the proposal's dimensions (the same factors encode
    divided by); only the datum comes from the refined rectangle.
    """
    prect = _as_rect(proposal)
    refined = decode_rect(t, prect)
    refs = reference_points(prect).vertices
    pts = []
    for i, p in enumerate(refs):
        prop_off_x = p.x - prect.x_min
        prop_off_y = p.y - prect.y_min
        pts.append(Point(
            refined.x_min + (prop_off_x + t.dx[i] * prect.width),
            refined.y_min + (prop_off_y + t.dy[i] * prect.height),
        ))
    return Polygon(tuple(pts))
