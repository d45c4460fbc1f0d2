"""Exact geometry on simple polygons: area, simplicity, intersection, IoU.

Coordinates are pixels (float). Polygons are plain vertex lists in either
winding; every operation normalizes orientation internally. Non-convex simple
polygons are supported throughout: intersection areas are computed by ear
clipping both inputs into triangles and clipping triangle pairs, which stays
correct where raw polygon-clipping algorithms have fragile degenerate cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from .errors import DegenerateInput, NonSimpleInput

# Degeneracy threshold for areas (pixels^2) and the tolerance applied to
# cross products in geometric predicates. Pixel-scale data makes both safe.
EPSILON_AREA = 1e-6
EPSILON_CROSS = 1e-9


class Point(NamedTuple):
    x: float
    y: float


class AARect(NamedTuple):
    """Axis-aligned rectangle, min corner is the datum for offset encoding."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def corners(self) -> tuple[Point, Point, Point, Point]:
        return (
            Point(self.x_min, self.y_min),
            Point(self.x_max, self.y_min),
            Point(self.x_max, self.y_max),
            Point(self.x_min, self.y_max),
        )


@dataclass(frozen=True)
class Polygon:
    """Ordered polygon with >= 3 finite vertices, no consecutive duplicates."""

    vertices: tuple[Point, ...]

    def __post_init__(self) -> None:
        pts = tuple(Point(float(x), float(y)) for x, y in self.vertices)
        if len(pts) < 3:
            raise ValueError(f"polygon needs >= 3 vertices, got {len(pts)}")
        for p in pts:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise ValueError(f"non-finite vertex {p}")
        for i, p in enumerate(pts):
            if p == pts[(i + 1) % len(pts)]:
                raise ValueError(f"consecutive duplicate vertex at index {i}")
        object.__setattr__(self, "vertices", pts)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]]) -> "Polygon":
        return cls(tuple(Point(float(p[0]), float(p[1])) for p in pairs))

    @classmethod
    def from_flat(cls, flat: Sequence[float]) -> "Polygon":
        if len(flat) % 2 != 0:
            raise ValueError("flat coordinate list must have even length")
        return cls.from_pairs(zip(flat[0::2], flat[1::2]))

    def flat(self) -> list[float]:
        return [c for p in self.vertices for c in p]

    def __len__(self) -> int:
        return len(self.vertices)

    def translated(self, dx: float, dy: float) -> "Polygon":
        return Polygon(tuple(Point(p.x + dx, p.y + dy) for p in self.vertices))

    def scaled(self, s: float) -> "Polygon":
        return Polygon(tuple(Point(p.x * s, p.y * s) for p in self.vertices))


def circumscribed_rect(p: Polygon) -> AARect:
    """Axis-aligned bounding rectangle; min corner is the offset datum."""
    xs = [v.x for v in p.vertices]
    ys = [v.y for v in p.vertices]
    return AARect(min(xs), min(ys), max(xs), max(ys))


def _signed_area(pts: Sequence[Point]) -> float:
    acc = 0.0
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        acc += x1 * y2 - x2 * y1
    return acc / 2.0


def polygon_area(p: Polygon) -> float:
    """Unsigned shoelace area; 0 for collinear input."""
    return abs(_signed_area(p.vertices))


def _cross(ox: float, oy: float, ax: float, ay: float, bx: float, by: float) -> float:
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _within_segment_box(px, py, ax, ay, bx, by, tol=EPSILON_CROSS) -> bool:
    return (
        min(ax, bx) - tol <= px <= max(ax, bx) + tol
        and min(ay, by) - tol <= py <= max(ay, by) + tol
    )


def segments_intersect(a1: Point, a2: Point, b1: Point, b2: Point) -> bool:
    """True if the closed segments share any point (crossing or touching)."""
    d1 = _cross(b1.x, b1.y, b2.x, b2.y, a1.x, a1.y)
    d2 = _cross(b1.x, b1.y, b2.x, b2.y, a2.x, a2.y)
    d3 = _cross(a1.x, a1.y, a2.x, a2.y, b1.x, b1.y)
    d4 = _cross(a1.x, a1.y, a2.x, a2.y, b2.x, b2.y)
    eps = EPSILON_CROSS
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
        (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    ):
        return True
    if abs(d1) <= eps and _within_segment_box(a1.x, a1.y, b1.x, b1.y, b2.x, b2.y):
        return True
    if abs(d2) <= eps and _within_segment_box(a2.x, a2.y, b1.x, b1.y, b2.x, b2.y):
        return True
    if abs(d3) <= eps and _within_segment_box(b1.x, b1.y, a1.x, a1.y, a2.x, a2.y):
        return True
    if abs(d4) <= eps and _within_segment_box(b2.x, b2.y, a1.x, a1.y, a2.x, a2.y):
        return True
    return False


@lru_cache(maxsize=8192)
def is_simple(p: Polygon) -> bool:
    """True iff no two non-adjacent edges touch, no vertex folds its two edges
    back onto each other (spike), and the polygon has positive area."""
    pts = p.vertices
    n = len(pts)
    if polygon_area(p) <= EPSILON_AREA:
        return False
    for i in range(n):
        a1, a2 = pts[i], pts[(i + 1) % n]
        for j in range(i + 1, n):
            b1, b2 = pts[j], pts[(j + 1) % n]
            if j == i + 1 or (i == 0 and j == n - 1):
                # adjacent: only a collinear fold-back violates simplicity
                shared, pa, pb = (a2, a1, b2) if j == i + 1 else (a1, b1, a2)
                ux, uy = pa.x - shared.x, pa.y - shared.y
                vx, vy = pb.x - shared.x, pb.y - shared.y
                if abs(ux * vy - uy * vx) <= EPSILON_CROSS and ux * vx + uy * vy > 0:
                    return False
                continue
            if segments_intersect(a1, a2, b1, b2):
                return False
    return True


def _drop_straight_vertices(pts: list[Point]) -> list[Point]:
    # Straight (collinear, non-reversing) vertices break ear predicates but do
    # not change the region; remove them before triangulating.
    changed = True
    while changed and len(pts) > 3:
        changed = False
        for i in range(len(pts)):
            a = pts[i - 1]
            b = pts[i]
            c = pts[(i + 1) % len(pts)]
            cr = _cross(a.x, a.y, b.x, b.y, c.x, c.y)
            dot = (b.x - a.x) * (c.x - b.x) + (b.y - a.y) * (c.y - b.y)
            if abs(cr) <= EPSILON_CROSS and dot > 0:
                pts.pop(i)
                changed = True
                break
    return pts


def _point_in_triangle(px, py, ax, ay, bx, by, cx, cy) -> bool:
    # inclusive test for a CCW triangle: inside or on boundary (within eps)
    eps = EPSILON_CROSS
    return (
        _cross(ax, ay, bx, by, px, py) >= -eps
        and _cross(bx, by, cx, cy, px, py) >= -eps
        and _cross(cx, cy, ax, ay, px, py) >= -eps
    )


Triangle = tuple[Point, Point, Point]


@lru_cache(maxsize=8192)
def _triangulate(p: Polygon) -> tuple[Triangle, ...]:
    """Ear-clip a simple polygon into CCW triangles partitioning its region."""
    pts = list(p.vertices)
    if _signed_area(pts) < 0:
        pts.reverse()
    pts = _drop_straight_vertices(pts)
    if len(pts) < 3:
        return ()
    tris: list[Triangle] = []
    idx = list(range(len(pts)))
    while len(idx) > 3:
        clipped = False
        for k in range(len(idx)):
            ip, ic, inx = idx[k - 1], idx[k], idx[(k + 1) % len(idx)]
            a, b, c = pts[ip], pts[ic], pts[inx]
            if _cross(a.x, a.y, b.x, b.y, c.x, c.y) <= EPSILON_CROSS:
                continue  # reflex or flat corner, not an ear
            blocked = False
            for m in idx:
                if m in (ip, ic, inx):
                    continue
                q = pts[m]
                if _point_in_triangle(q.x, q.y, a.x, a.y, b.x, b.y, c.x, c.y):
                    blocked = True
                    break
            if not blocked:
                tris.append((a, b, c))
                idx.pop(k)
                clipped = True
                break
        if not clipped:
            # Numerically stuck (boundary-touching candidates everywhere):
            # clip the smallest convex corner to guarantee progress.
            best_k, best_area = -1, math.inf
            for k in range(len(idx)):
                a = pts[idx[k - 1]]
                b = pts[idx[k]]
                c = pts[idx[(k + 1) % len(idx)]]
                cr = _cross(a.x, a.y, b.x, b.y, c.x, c.y)
                if cr > -EPSILON_CROSS and abs(cr) < best_area:
                    best_k, best_area = k, abs(cr)
            if best_k < 0:
                best_k = 0
            a = pts[idx[best_k - 1]]
            b = pts[idx[best_k]]
            c = pts[idx[(best_k + 1) % len(idx)]]
            tris.append((a, b, c))
            idx.pop(best_k)
    tris.append((pts[idx[0]], pts[idx[1]], pts[idx[2]]))
    return tuple(tris)


def _clip_poly_halfplanes(subject: list[Point], clip: Triangle) -> list[Point]:
    # Sutherland-Hodgman against a CCW convex clip polygon; boundary inclusive.
    output = subject
    c1 = clip[-1]
    for c2 in clip:
        if not output:
            return output
        dcx = c1.x - c2.x
        dcy = c1.y - c2.y
        n1 = c1.x * c2.y - c1.y * c2.x
        input_list = output
        output = []
        s = input_list[-1]
        s_in = dcx * (s.y - c1.y) - dcy * (s.x - c1.x) <= 0.0
        for e in input_list:
            e_in = dcx * (e.y - c1.y) - dcy * (e.x - c1.x) <= 0.0
            if e_in != s_in:
                dpx = s.x - e.x
                dpy = s.y - e.y
                den = dcx * dpy - dcy * dpx
                if den != 0.0:
                    n2 = s.x * e.y - s.y * e.x
                    output.append(Point((n1 * dpx - n2 * dcx) / den,
                                        (n1 * dpy - n2 * dcy) / den))
            if e_in:
                output.append(e)
            s, s_in = e, e_in
        c1 = c2
    return output


def intersection_area(a: Polygon, b: Polygon) -> float:
    """Area of the overlap region of two simple polygons, in pixels^2.

    Raises NonSimpleInput when either polygon has intersecting sides.
    Shared-boundary-only contact counts as zero overlap.
    """
    if not is_simple(a):
        raise NonSimpleInput("first polygon is not simple")
    if not is_simple(b):
        raise NonSimpleInput("second polygon is not simple")
    ra, rb = circumscribed_rect(a), circumscribed_rect(b)
    if (
        ra.x_max <= rb.x_min or rb.x_max <= ra.x_min
        or ra.y_max <= rb.y_min or rb.y_max <= ra.y_min
    ):
        return 0.0
    total = 0.0
    tris_b = _triangulate(b)
    for ta in _triangulate(a):
        # bounding box of the subject triangle prunes most pairs
        ta_xmin = min(ta[0].x, ta[1].x, ta[2].x)
        ta_xmax = max(ta[0].x, ta[1].x, ta[2].x)
        ta_ymin = min(ta[0].y, ta[1].y, ta[2].y)
        ta_ymax = max(ta[0].y, ta[1].y, ta[2].y)
        for tb in tris_b:
            if (
                ta_xmax <= min(tb[0].x, tb[1].x, tb[2].x)
                or ta_xmin >= max(tb[0].x, tb[1].x, tb[2].x)
                or ta_ymax <= min(tb[0].y, tb[1].y, tb[2].y)
                or ta_ymin >= max(tb[0].y, tb[1].y, tb[2].y)
            ):
                continue
            region = _clip_poly_halfplanes(list(ta), tb)
            if len(region) >= 3:
                total += abs(_signed_area(region))
    return min(total, min(polygon_area(a), polygon_area(b)))


@lru_cache(maxsize=65536)
def polygon_iou(a: Polygon, b: Polygon) -> float:
    """Exact intersection-over-union between two simple polygons.

    Pure and cached: suppression and evaluation revisit the same pairs.
    """
    inter = intersection_area(a, b)
    union = polygon_area(a) + polygon_area(b) - inter
    if union <= EPSILON_AREA:
        raise DegenerateInput("union area below degeneracy threshold")
    return min(inter / union, 1.0)


def rect_iou(a: AARect, b: AARect) -> float:
    """Axis-aligned IoU of two rectangles (classic NMS overlap)."""
    iw = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    ih = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    union = a.width * a.height + b.width * b.height - inter
    if union <= EPSILON_AREA:
        raise DegenerateInput("union area below degeneracy threshold")
    return inter / union
