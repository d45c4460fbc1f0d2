import numpy as np
import pytest

import oracles
from curvetext.errors import DegenerateProposal
from curvetext.geometry import AARect, Polygon, circumscribed_rect
from curvetext.offsets import OffsetTargets, decode, decode_rect, encode, reference_points


def random_gt(rng, spread=60.0):
    cx, cy = rng.uniform(10, spread, 2)
    r = rng.uniform(3, 15)
    return Polygon.from_pairs(
        oracles.star_polygon(rng, 14, center=(cx, cy), r_min=0.5 * r, r_max=r)
    )


def random_proposal_rect(rng, gt):
    # jittered box around the ground truth, as a proposal stage would emit
    rect = circumscribed_rect(gt)
    jx, jy = rng.uniform(-0.3, 0.3, 2) * rect.width
    sx, sy = rng.uniform(0.6, 1.6, 2)
    w, h = max(rect.width * sx, 2.0), max(rect.height * sy, 2.0)
    return AARect(rect.x_min + jx, rect.y_min + jy, rect.x_min + jx + w, rect.y_min + jy + h)


def test_identity_encoding_is_zero():
    gt = reference_points(AARect(5, 5, 35, 15))
    t = encode(gt, AARect(5, 5, 35, 15))
    assert np.allclose(t.dx, 0.0, atol=1e-15)
    assert np.allclose(t.dy, 0.0, atol=1e-15)
    assert np.allclose(t.rect_deltas, 0.0, atol=1e-15)


def test_zero_targets_decode_to_reference_points():
    prop = AARect(5, 5, 35, 15)
    t = OffsetTargets(np.zeros(14), np.zeros(14), np.zeros(4))
    got = decode(t, prop)
    want = reference_points(prop)
    assert np.allclose(got.flat(), want.flat(), atol=1e-12)


def test_round_trip_reproduces_gt():
    rng = np.random.default_rng(31)
    for _ in range(200):
        gt = random_gt(rng)
        prop = random_proposal_rect(rng, gt)
        got = decode(encode(gt, prop), prop)
        assert np.allclose(got.flat(), gt.flat(), atol=1e-6)


def test_round_trip_with_polygon_proposal():
    rng = np.random.default_rng(32)
    for _ in range(50):
        gt = random_gt(rng)
        prop_poly = random_gt(rng)
        t = encode(gt, prop_poly)
        got = decode(t, circumscribed_rect(prop_poly))
        assert np.allclose(got.flat(), gt.flat(), atol=1e-6)


def test_scale_invariance_exact_for_power_of_two():
    rng = np.random.default_rng(33)
    for _ in range(50):
        gt = random_gt(rng)
        prop = random_proposal_rect(rng, gt)
        base = encode(gt, prop)
        for s in (2.0, 4.0, 0.5):
            scaled = encode(
                gt.scaled(s),
                AARect(prop.x_min * s, prop.y_min * s, prop.x_max * s, prop.y_max * s),
            )
            assert np.array_equal(scaled.dx, base.dx)
            assert np.array_equal(scaled.dy, base.dy)
            assert np.array_equal(scaled.rect_deltas, base.rect_deltas)


def test_scale_invariance_close_for_arbitrary_scale():
    rng = np.random.default_rng(34)
    gt = random_gt(rng)
    prop = random_proposal_rect(rng, gt)
    base = encode(gt, prop)
    s = 3.7
    scaled = encode(
        gt.scaled(s), AARect(prop.x_min * s, prop.y_min * s, prop.x_max * s, prop.y_max * s)
    )
    assert np.allclose(scaled.dx, base.dx, atol=1e-12)
    assert np.allclose(scaled.dy, base.dy, atol=1e-12)
    assert np.allclose(scaled.rect_deltas, base.rect_deltas, atol=1e-12)


def test_translation_equivariance_of_decode():
    rng = np.random.default_rng(35)
    gt = random_gt(rng)
    prop = random_proposal_rect(rng, gt)
    t = encode(gt, prop)
    base = decode(t, prop)
    moved = decode(
        t, AARect(prop.x_min + 100, prop.y_min - 40, prop.x_max + 100, prop.y_max - 40)
    )
    delta = np.asarray(moved.flat()) - np.asarray(base.flat())
    assert np.allclose(delta[0::2], 100.0, atol=1e-9)
    assert np.allclose(delta[1::2], -40.0, atol=1e-9)


def test_gt_offsets_from_datum_are_nonnegative():
    rng = np.random.default_rng(36)
    for _ in range(50):
        gt = random_gt(rng)
        rect = circumscribed_rect(gt)
        for v in gt.vertices:
            assert v.x - rect.x_min >= 0.0
            assert v.y - rect.y_min >= 0.0


def test_degenerate_proposal_rejected():
    gt = reference_points(AARect(0, 0, 30, 10))
    with pytest.raises(DegenerateProposal):
        encode(gt, AARect(0, 0, 0.5, 10))
    with pytest.raises(DegenerateProposal):
        decode(OffsetTargets(np.zeros(14), np.zeros(14), np.zeros(4)), AARect(0, 0, 10, 0.2))


def test_decode_rect_inverts_rect_deltas():
    rng = np.random.default_rng(37)
    for _ in range(50):
        gt = random_gt(rng)
        prop = random_proposal_rect(rng, gt)
        refined = decode_rect(encode(gt, prop), prop)
        want = circumscribed_rect(gt)
        assert np.allclose(tuple(refined), tuple(want), atol=1e-9)


def test_offset_targets_validation():
    with pytest.raises(ValueError):
        OffsetTargets(np.zeros(13), np.zeros(14), np.zeros(4))
    with pytest.raises(ValueError):
        OffsetTargets(np.zeros(14), np.zeros(14), np.zeros(3))
    with pytest.raises(ValueError):
        OffsetTargets(np.full(14, np.nan), np.zeros(14), np.zeros(4))
