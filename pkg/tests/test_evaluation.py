import pytest

from curvetext.annotations import Annotation, Detection, ShapeKind, interpolate_quad
from curvetext.errors import InvalidThreshold, KeyMismatch
from curvetext.evaluation import (
    Outcome,
    Subset,
    evaluate,
    hmean,
)


def square14(x0, y0, side):
    return interpolate_quad(
        [(x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side)]
    )


def gt_square(x0, y0, side, kind=ShapeKind.CURVE, care=True):
    return Annotation(square14(x0, y0, side), kind, care)


def det_square(x0, y0, side, score):
    return Detection(square14(x0, y0, side), score)


# squares sized so the offset detections hit exact IoUs:
# 19x19 shifted 1 -> 342/380 = 0.9; 20x20 shifted 5 -> 300/500 = 0.6;
# 7x7 shifted 3 -> 28/70 = 0.4
def golden_case():
    gts = [gt_square(0, 0, 19), gt_square(100, 0, 20), gt_square(200, 0, 7)]
    dets = [
        det_square(1, 0, 19, 0.95),
        det_square(105, 0, 20, 0.90),
        det_square(203, 0, 7, 0.85),
        det_square(300, 0, 10, 0.80),
    ]
    return {"img": gts}, {"img": dets}


def test_perfect_single_detection():
    gt = {"img": [gt_square(0, 0, 10)]}
    det = {"img": [det_square(0, 0, 10, 1.0)]}
    report = evaluate(gt, det, 0.5)
    assert (report.recall, report.precision, report.hmean) == (1.0, 1.0, 1.0)
    assert report.tp == 1 and report.fp == 0 and report.num_care_gt == 1
    assert report.per_image[0][0].outcome is Outcome.TRUE_POSITIVE


def test_dont_care_absorbs_detection():
    gt = {"img": [gt_square(0, 0, 19, care=False)]}
    det = {"img": [det_square(1, 0, 19, 0.9)]}
    report = evaluate(gt, det, 0.5)
    assert report.tp == 0 and report.fp == 0 and report.num_care_gt == 0
    assert (report.recall, report.precision, report.hmean) == (0.0, 0.0, 0.0)
    assert report.per_image[0][0].outcome is Outcome.IGNORED


def test_hand_enumerated_golden_case():
    gt, det = golden_case()
    report = evaluate(gt, det, 0.5)
    assert report.tp == 2 and report.fp == 2 and report.num_care_gt == 3
    assert report.recall == 2.0 / 3.0
    assert report.precision == 0.5
    assert report.hmean == pytest.approx(4.0 / 7.0, abs=1e-15)
    outcomes = [r.outcome for r in report.per_image[0]]
    assert outcomes == [
        Outcome.TRUE_POSITIVE,
        Outcome.TRUE_POSITIVE,
        Outcome.FALSE_POSITIVE,
        Outcome.FALSE_POSITIVE,
    ]


def test_adding_dont_care_changes_nothing():
    gt, det = golden_case()
    base = evaluate(gt, det, 0.5)
    gt2 = {"img": gt["img"] + [gt_square(400, 0, 12, care=False)]}
    det2 = {"img": det["img"] + [det_square(401, 0, 12, 0.70)]}
    report = evaluate(gt2, det2, 0.5)
    assert report.tp == base.tp
    assert report.fp == base.fp
    assert report.num_care_gt == base.num_care_gt
    assert report.recall == base.recall
    assert report.per_image[0][4].outcome is Outcome.IGNORED


def test_each_gt_matched_at_most_once():
    gt = {"img": [gt_square(0, 0, 20)]}
    det = {
        "img": [det_square(0, 0, 20, 0.9), det_square(1, 0, 20, 0.8)]
    }
    report = evaluate(gt, det, 0.5)
    assert report.tp == 1 and report.fp == 1


def test_detection_order_invariance():
    gt, det = golden_case()
    base = evaluate(gt, det, 0.5)
    shuffled = {"img": list(reversed(det["img"]))}
    report = evaluate(gt, shuffled, 0.5)
    assert (report.tp, report.fp, report.recall, report.precision) == (
        base.tp, base.fp, base.recall, base.precision,
    )


def test_subset_filters():
    gts = {
        "img": [
            gt_square(0, 0, 19, kind=ShapeKind.CURVE),
            gt_square(100, 0, 19, kind=ShapeKind.RECT),
        ]
    }
    dets = {
        "img": [det_square(0, 0, 19, 0.9), det_square(100, 0, 19, 0.8)]
    }
    whole = evaluate(gts, dets, 0.5, Subset.WHOLE)
    curve = evaluate(gts, dets, 0.5, Subset.CURVE_ONLY)
    noncurve = evaluate(gts, dets, 0.5, Subset.NONCURVE_ONLY)
    assert whole.tp == 2 and whole.num_care_gt == 2
    assert curve.tp == 1 and curve.num_care_gt == 1
    assert noncurve.tp == 1 and noncurve.num_care_gt == 1
    # the re-flagged region absorbs its detection instead of charging a FP
    assert curve.fp == 0 and noncurve.fp == 0
    assert whole.tp >= curve.tp and whole.tp >= noncurve.tp


def test_raising_threshold_never_increases_tp():
    gt, det = golden_case()
    tps = [evaluate(gt, det, thr).tp for thr in (0.3, 0.5, 0.7, 0.95)]
    assert tps == sorted(tps, reverse=True)


def test_multi_image_aggregation():
    gt = {
        "a": [gt_square(0, 0, 10)],
        "b": [gt_square(0, 0, 10), gt_square(50, 0, 10)],
        "empty": [],
    }
    det = {
        "a": [det_square(0, 0, 10, 0.9)],
        "b": [det_square(0, 0, 10, 0.8)],
    }
    report = evaluate(gt, det, 0.5)
    assert report.images == ("a", "b", "empty")
    assert report.tp == 2 and report.fp == 0 and report.num_care_gt == 3
    assert report.recall == pytest.approx(2.0 / 3.0)


def test_key_mismatch_and_threshold_validation():
    gt = {"a": [gt_square(0, 0, 10)]}
    with pytest.raises(KeyMismatch):
        evaluate(gt, {"zz": []}, 0.5)
    with pytest.raises(InvalidThreshold):
        evaluate(gt, {}, 0.0)
    with pytest.raises(InvalidThreshold):
        evaluate(gt, {}, 1.0)


def test_hmean_values():
    assert hmean(1.0, 1.0) == 1.0
    assert hmean(0.0, 0.5) == 0.0
    assert hmean(0.774, 0.698) == pytest.approx(0.734, abs=1e-3)


def test_report_as_dict_round_trips_through_json():
    import json

    gt, det = golden_case()
    report = evaluate(gt, det, 0.5)
    blob = json.dumps(report.as_dict())
    parsed = json.loads(blob)
    assert parsed["tp"] == 2
    assert parsed["per_image"]["img"][0]["outcome"] == "true_positive"
