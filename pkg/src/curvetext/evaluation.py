"""Detection evaluation: polygon-IoU matching, don't-care handling, subsets.

The protocol is the familiar single-point PASCAL-VOC style matching with the
overlap metric switched to exact polygon IoU. Per image, detections are
visited by descending score and greedily matched to the unmatched care ground
truth with the highest IoU; a match at or above the threshold is a true
positive. Detections that fail to match but sit on a care=False region are
ignored rather than counted as false positives, and care=False regions never
enter the recall denominator. Subset evaluation (curve-only / non-curve-only)
re-flags the other kind as care=False before matching.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Sequence

from .annotations import Annotation, Detection, ShapeKind
from .errors import InvalidThreshold, KeyMismatch
from .geometry import polygon_iou


class Subset(enum.Enum):
    WHOLE = "whole"
    CURVE_ONLY = "curve"
    NONCURVE_ONLY = "noncurve"


class Outcome(enum.Enum):
    TRUE_POSITIVE = "true_positive"
    FALSE_POSITIVE = "false_positive"
    IGNORED = "ignored"


@dataclass(frozen=True)
class MatchRecord:
    detection_index: int
    matched_gt_index: int | None
    iou: float
    outcome: Outcome

    def as_dict(self) -> dict:
        return {
            "detection_index": self.detection_index,
            "matched_gt_index": self.matched_gt_index,
            "iou": self.iou,
            "outcome": self.outcome.value,
        }


@dataclass(frozen=True)
class EvalReport:
    recall: float
    precision: float
    hmean: float
    tp: int
    fp: int
    num_care_gt: int
    images: tuple[str, ...]
    per_image: tuple[tuple[MatchRecord, ...], ...]

    def as_dict(self) -> dict:
        return {
            "recall": self.recall,
            "precision": self.precision,
            "hmean": self.hmean,
            "tp": self.tp,
            "fp": self.fp,
            "num_care_gt": self.num_care_gt,
            "per_image": {
                image: [r.as_dict() for r in records]
                for image, records in zip(self.images, self.per_image)
            },
        }

    def summary(self) -> str:
        return (
            f"R={self.recall * 100:.1f}% "
            f"P={self.precision * 100:.1f}% "
            f"H={self.hmean * 100:.1f}%"
        )


def hmean(p: float, r: float) -> float:
    """Harmonic mean of precision and recall; 0 when both vanish."""
    if p + r == 0.0:
        return 0.0
    return 2.0 * p * r / (p + r)


def _effective_care(ann: Annotation, subset: Subset) -> bool:
    if not ann.care:
        return False
    if subset is Subset.CURVE_ONLY:
        return ann.shape_kind is ShapeKind.CURVE
    if subset is Subset.NONCURVE_ONLY:
        return ann.shape_kind is not ShapeKind.CURVE
    return True


def _safe_iou(a, b) -> float:
    try:
        return polygon_iou(a, b)
    except Exception:
        return 0.0


def _match_image(
    gts: Sequence[Annotation],
    dets: Sequence[Detection],
    iou_threshold: float,
    subset: Subset,
) -> tuple[list[MatchRecord], int, int, int]:
    care = [_effective_care(g, subset) for g in gts]
    order = sorted(range(len(dets)), key=lambda i: -dets[i].score)
    matched = [False] * len(gts)
    records: list[MatchRecord] = []
    tp = fp = 0
    for di in order:
        poly = dets[di].polygon
        best_gt, best_iou = None, 0.0
        for gi, g in enumerate(gts):
            if not care[gi] or matched[gi]:
                continue
            iou = _safe_iou(poly, g.polygon)
            if iou > best_iou:  # ties keep the lower gt index
                best_gt, best_iou = gi, iou
        if best_gt is not None and best_iou >= iou_threshold:
            matched[best_gt] = True
            tp += 1
            records.append(MatchRecord(di, best_gt, best_iou, Outcome.TRUE_POSITIVE))
            continue
        dontcare_iou = 0.0
        for gi, g in enumerate(gts):
            if care[gi]:
                continue
            dontcare_iou = max(dontcare_iou, _safe_iou(poly, g.polygon))
        if dontcare_iou > iou_threshold:
            records.append(MatchRecord(di, None, dontcare_iou, Outcome.IGNORED))
        else:
            fp += 1
            records.append(MatchRecord(di, None, best_iou, Outcome.FALSE_POSITIVE))
    records.sort(key=lambda r: r.detection_index)
    return records, tp, fp, sum(care)


def evaluate(
    gt: Mapping[str, Sequence[Annotation]],
    dets: Mapping[str, Sequence[Detection]],
    iou_threshold: float = 0.5,
    subset: Subset = Subset.WHOLE,
) -> EvalReport:
    """Score detections against ground truth over a keyed image collection.

    Every detection image key must exist in the ground truth; ground-truth
    images without detections simply contribute misses.
    """
    if not 0.0 < iou_threshold < 1.0:
        raise InvalidThreshold(f"iou threshold {iou_threshold} outside (0, 1)")
    missing = sorted(set(dets) - set(gt))
    if missing:
        raise KeyMismatch(f"detections without ground truth: {', '.join(missing)}")
    images = tuple(sorted(gt))
    per_image: list[tuple[MatchRecord, ...]] = []
    tp = fp = num_care = 0
    for image in images:
        records, itp, ifp, icare = _match_image(
            gt[image], dets.get(image, ()), iou_threshold, subset
        )
        per_image.append(tuple(records))
        tp += itp
        fp += ifp
        num_care += icare
    recall = tp / num_care if num_care else 0.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    return EvalReport(
        recall=recall,
        precision=precision,
        hmean=hmean(precision, recall),
        tp=tp,
        fp=fp,
        num_care_gt=num_care,
        images=images,
        per_image=tuple(per_image),
    )
