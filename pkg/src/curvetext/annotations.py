"""Annotation and detection file formats, and long-side interpolation.

Canonical on-disk layout for a curve region is one line of 32 comma-separated
integers: the circumscribed rectangle (x_min, y_min, x_max, y_max) followed by
14 offset pairs (w_i, h_i) measured from the rectangle's min corner, which are
always >= 0. Also accepted: 28 integers (absolute vertex coordinates), 8
integers (quadrilateral corners) and 4 integers (axis-aligned rectangle); the
short forms are lifted to 14 points by interpolating 5 equal-division points
on the longest side and 5 on its opposite side. A line may carry a trailing
"#care=0" marker for regions excluded from evaluation.
"""

from __future__ import annotations

import enum
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import BoundsError, DegenerateQuad, FormatError, ScoreRangeError
from .geometry import Point, Polygon, is_simple

EPS_SIDE = 1e-6


class ShapeKind(enum.Enum):
    RECT = "rect"
    QUAD = "quad"
    CURVE = "curve"


@dataclass(frozen=True)
class Annotation:
    polygon: Polygon
    shape_kind: ShapeKind
    care: bool = True

    def __post_init__(self) -> None:
        if len(self.polygon) != 14:
            raise ValueError(f"annotation polygon must have 14 vertices, got {len(self.polygon)}")


@dataclass(frozen=True)
class Detection:
    polygon: Polygon
    score: float

    def __post_init__(self) -> None:
        if len(self.polygon) != 14:
            raise ValueError(f"detection polygon must have 14 vertices, got {len(self.polygon)}")
        if not math.isfinite(self.score):
            raise ValueError("detection score must be finite")


@dataclass(frozen=True)
class DatasetStats:
    image_count: int
    box_count: int
    curve_box_count: int

    def __post_init__(self) -> None:
        if self.curve_box_count > self.box_count:
            raise ValueError("curve boxes cannot exceed total boxes")

    def as_dict(self) -> dict:
        return {
            "images": self.image_count,
            "boxes": self.box_count,
            "curve_boxes": self.curve_box_count,
        }


def round_half_up(v: float) -> int:
    """Pixel rounding used by every serializer (floor(v + 0.5), not banker's)."""
    return int(math.floor(v + 0.5))


def _lerp(a: Point, b: Point, t: float) -> Point:
    return Point(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))


def interpolate_quad(quad: Sequence[Sequence[float]]) -> Polygon:
    """Lift a simple quadrilateral to 14 points by equal-division interpolation.

    Five interior points at t = k/6 (k = 1..5) are placed on the longest side
    and on its opposite side. Output order starts at the longest side's start
    corner and preserves the quad's cyclic orientation, so corners sit at
    output indices 0, 6, 7 and 13. Ties on side length go to the lowest
    starting-vertex index.
    """
    if len(quad) != 4:
        raise DegenerateQuad(f"need 4 corners, got {len(quad)}")
    q = [Point(float(p[0]), float(p[1])) for p in quad]
    sides = [(q[i], q[(i + 1) % 4]) for i in range(4)]
    lengths_sq = [(b.x - a.x) ** 2 + (b.y - a.y) ** 2 for a, b in sides]
    if min(lengths_sq) < EPS_SIDE * EPS_SIDE:
        raise DegenerateQuad("side shorter than epsilon")
    if not is_simple(Polygon(tuple(q))):
        raise DegenerateQuad("quad sides intersect")
    s = 0
    for i in range(1, 4):
        if lengths_sq[i] > lengths_sq[s]:
            s = i
    c0, c1 = q[s], q[(s + 1) % 4]
    c2, c3 = q[(s + 2) % 4], q[(s + 3) % 4]
    out = [c0]
    out += [_lerp(c0, c1, k / 6.0) for k in range(1, 6)]
    out += [c1, c2]
    out += [_lerp(c2, c3, k / 6.0) for k in range(1, 6)]
    out.append(c3)
    return Polygon(tuple(out))


def _split_care(line: str) -> tuple[str, bool]:
    body, sep, suffix = line.partition("#")
    if not sep:
        return body.strip(), True
    suffix = suffix.strip()
    if suffix == "care=0":
        return body.strip(), False
    if suffix == "care=1":
        return body.strip(), True
    raise FormatError(f"unrecognized suffix {suffix!r}")


def _int_tokens(body: str) -> list[int]:
    tokens = [t.strip() for t in body.split(",")]
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise FormatError(f"non-integer token in {body!r}") from exc


def parse_annotation_line(line: str) -> Annotation:
    """Parse one region line (32/28/8/4-value form, optional #care suffix)."""
    body, care = _split_care(line)
    values = _int_tokens(body)
    if len(values) == 32:
        x_min, y_min, x_max, y_max = values[:4]
        if x_min > x_max or y_min > y_max:
            raise BoundsError("inverted rectangle")
        pts = []
        for w, h in zip(values[4::2], values[5::2]):
            if w < 0 or h < 0:
                raise BoundsError(f"negative relative offset ({w},{h})")
            if x_min + w > x_max + 1 or y_min + h > y_max + 1:
                raise BoundsError(f"vertex ({x_min + w},{y_min + h}) outside declared rectangle")
            pts.append(Point(float(x_min + w), float(y_min + h)))
        return Annotation(Polygon(tuple(pts)), ShapeKind.CURVE, care)
    if len(values) == 28:
        poly = Polygon.from_flat([float(v) for v in values])
        return Annotation(poly, ShapeKind.CURVE, care)
    if len(values) == 8:
        quad = list(zip(values[0::2], values[1::2]))
        return Annotation(interpolate_quad(quad), ShapeKind.QUAD, care)
    if len(values) == 4:
        x_min, y_min, x_max, y_max = values
        if x_min >= x_max or y_min >= y_max:
            raise BoundsError("empty rectangle")
        corners = [(x_min, y_min), (x_max, y_min), (x_max, y_max), (x_min, y_max)]
        return Annotation(interpolate_quad(corners), ShapeKind.RECT, care)
    raise FormatError(f"expected 32/28/8/4 values, got {len(values)}")


def serialize_annotation(ann: Annotation) -> str:
    """Canonical line for an annotation; coordinates land on the pixel grid."""
    pts = [(round_half_up(p.x), round_half_up(p.y)) for p in ann.polygon.vertices]
    if ann.shape_kind is ShapeKind.CURVE:
        x_min = min(x for x, _ in pts)
        y_min = min(y for _, y in pts)
        x_max = max(x for x, _ in pts)
        y_max = max(y for _, y in pts)
        fields = [x_min, y_min, x_max, y_max]
        for x, y in pts:
            fields += [x - x_min, y - y_min]
    elif ann.shape_kind is ShapeKind.QUAD:
        # interpolation places the source corners at 0, 6, 7, 13
        corners = [pts[0], pts[6], pts[7], pts[13]]
        fields = [c for xy in corners for c in xy]
    else:
        xs = [x for x, _ in pts]
        ys = [y for _, y in pts]
        fields = [min(xs), min(ys), max(xs), max(ys)]
    line = ",".join(str(v) for v in fields)
    return line if ann.care else line + "#care=0"


def parse_detection_line(line: str) -> Detection:
    """Parse "score,x1,y1,...,x14,y14" (29 comma-separated numbers)."""
    tokens = [t.strip() for t in line.strip().split(",")]
    if len(tokens) != 29:
        raise FormatError(f"expected 29 values, got {len(tokens)}")
    try:
        values = [float(t) for t in tokens]
    except ValueError as exc:
        raise FormatError(f"non-numeric token in {line!r}") from exc
    score = values[0]
    if not 0.0 <= score <= 1.0:
        raise ScoreRangeError(f"score {score} outside [0, 1]")
    return Detection(Polygon.from_flat(values[1:]), score)


def serialize_detection(det: Detection) -> str:
    return ",".join(repr(v) for v in [det.score] + det.polygon.flat())


def validate_annotation_text(text: str) -> list[dict]:
    """Check annotation lines; returns one {"line", "message"} per violation.

    The same grammar backs the batch validator and the labeling server, so a
    region accepted in one place is accepted everywhere.
    """
    violations = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            ann = parse_annotation_line(raw)
        except Exception as exc:
            violations.append({"line": lineno, "message": str(exc)})
            continue
        if not is_simple(ann.polygon):
            violations.append({"line": lineno, "message": "non-simple polygon"})
    return violations


def dataset_stats(per_image: Mapping[str, Sequence[Annotation]]) -> DatasetStats:
    """Image/box/curve-box counts over a parsed annotation set."""
    boxes = 0
    curve = 0
    for anns in per_image.values():
        boxes += len(anns)
        curve += sum(1 for a in anns if a.shape_kind is ShapeKind.CURVE)
    return DatasetStats(len(per_image), boxes, curve)


# ---------------------------------------------------------------------------
# file I/O: one <image-stem>.txt per image, one region/detection per line
# ---------------------------------------------------------------------------

def _nonblank_lines(path: Path) -> Iterable[tuple[int, str]]:
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if raw.strip():
            yield lineno, raw


def load_annotation_file(path: str | os.PathLike) -> list[Annotation]:
    path = Path(path)
    out = []
    for lineno, raw in _nonblank_lines(path):
        try:
            out.append(parse_annotation_line(raw))
        except Exception as exc:
            raise type(exc)(f"{path}:{lineno}: {exc}") from exc
    return out


def load_detection_file(path: str | os.PathLike) -> list[Detection]:
    path = Path(path)
    out = []
    for lineno, raw in _nonblank_lines(path):
        try:
            out.append(parse_detection_line(raw))
        except Exception as exc:
            raise type(exc)(f"{path}:{lineno}: {exc}") from exc
    return out


def load_annotation_dir(directory: str | os.PathLike) -> dict[str, list[Annotation]]:
    return {
        p.stem: load_annotation_file(p)
        for p in sorted(Path(directory).glob("*.txt"))
    }


def load_detection_dir(directory: str | os.PathLike) -> dict[str, list[Detection]]:
    return {
        p.stem: load_detection_file(p)
        for p in sorted(Path(directory).glob("*.txt"))
    }


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write via temp file + rename so a killed process never truncates."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_annotation_file(path: str | os.PathLike, anns: Sequence[Annotation]) -> None:
    atomic_write_text(path, "".join(serialize_annotation(a) + "\n" for a in anns))


def write_detection_file(path: str | os.PathLike, dets: Sequence[Detection]) -> None:
    atomic_write_text(path, "".join(serialize_detection(d) + "\n" for d in dets))
