import json
from pathlib import Path

import numpy as np
import pytest

import oracles
from curvetext.annotations import (
    Detection,
    interpolate_quad,
    load_annotation_file,
    parse_annotation_line,
    serialize_detection,
)
from curvetext.cli import main
from curvetext.geometry import Polygon

GOLDEN = Path(__file__).parent / "data" / "golden_eval"


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_validate_clean_directory(tmp_path, capsys):
    (tmp_path / "a.txt").write_text("0,0,12,6\n", encoding="utf-8")
    code, out, err = run(capsys, ["validate", str(tmp_path)])
    assert code == 0
    assert json.loads(out)["violations"] == []


def test_validate_flags_bowtie_and_bad_lines(tmp_path, capsys):
    # shuffled 14-gon: crossing sides
    rng = np.random.default_rng(71)
    while True:
        pts = [(round(x) + 30, round(y) + 30) for x, y in oracles.shuffled_polygon(rng, 14)]
        try:
            poly = Polygon.from_pairs(pts)
        except ValueError:
            continue
        from curvetext.geometry import is_simple

        if not is_simple(poly):
            break
    line = ",".join(f"{int(p.x)},{int(p.y)}" for p in poly.vertices)
    (tmp_path / "bad.txt").write_text(line + "\nnot,a,line\n", encoding="utf-8")
    code, out, err = run(capsys, ["validate", str(tmp_path)])
    assert code == 1
    report = json.loads(out)
    assert len(report["violations"]) == 2
    assert report["violations"][0]["message"] == "non-simple polygon"
    assert all("line" in v and "file" in v for v in report["violations"])
    assert "bad.txt:1" in err


def test_validate_missing_directory(tmp_path, capsys):
    code, _, err = run(capsys, ["validate", str(tmp_path / "nope")])
    assert code == 2
    assert "error" in err


def test_validate_fuzzed_lines_always_carry_provenance(tmp_path, capsys):
    rng = np.random.default_rng(74)
    alphabet = list("0123456789,-.#=care xyz")
    lines = []
    for _ in range(40):
        n = int(rng.integers(1, 60))
        lines.append("".join(rng.choice(alphabet) for _ in range(n)))
    lines.append(",".join(str(int(v)) for v in rng.integers(-5, 50, 32)))
    (tmp_path / "fuzz.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    code, out, _ = run(capsys, ["validate", str(tmp_path)])
    report = json.loads(out)
    assert code in (0, 1)
    for v in report["violations"]:
        assert v["file"].endswith("fuzz.txt")
        assert isinstance(v["line"], int) and 1 <= v["line"] <= len(lines)
        assert v["message"]


def test_interp_converts_and_is_idempotent(tmp_path, capsys):
    src = tmp_path / "in"
    out1 = tmp_path / "out1"
    out2 = tmp_path / "out2"
    src.mkdir()
    (src / "img.txt").write_text("0,0,12,2\n6,0,18,0,18,6,6,6\n", encoding="utf-8")
    code, out, _ = run(capsys, ["interp", str(src), str(out1)])
    assert code == 0
    assert json.loads(out)["converted"] == 2
    anns = load_annotation_file(out1 / "img.txt")
    # first line decodes to the exact equal-division rectangle interpolation
    want = interpolate_quad([(0, 0), (12, 0), (12, 2), (0, 2)])
    assert anns[0].polygon == want
    assert anns[1].polygon == interpolate_quad([(6, 0), (18, 0), (18, 6), (6, 6)])
    # converting again changes nothing, byte for byte
    code, out, _ = run(capsys, ["interp", str(out1), str(out2)])
    assert code == 0
    assert json.loads(out)["converted"] == 0
    assert (out2 / "img.txt").read_bytes() == (out1 / "img.txt").read_bytes()


def test_interp_random_quads_round_trip(tmp_path, capsys):
    rng = np.random.default_rng(72)
    src = tmp_path / "in"
    out = tmp_path / "out"
    src.mkdir()
    quads = []
    for _ in range(10):
        x0, y0 = (int(v) * 6 for v in rng.integers(0, 10, 2))
        w, h = (int(v) * 6 for v in rng.integers(2, 8, 2))
        quads.append([(x0, y0), (x0 + w, y0 + 6), (x0 + w + 6, y0 + h), (x0 + 6, y0 + h + 6)])
    (src / "q.txt").write_text(
        "".join(",".join(f"{x},{y}" for x, y in q) + "\n" for q in quads),
        encoding="utf-8",
    )
    code, _, _ = run(capsys, ["interp", str(src), str(out)])
    assert code == 0
    parsed = load_annotation_file(out / "q.txt")
    for q, ann in zip(quads, parsed):
        assert ann.polygon == interpolate_quad(q)


def test_eval_golden_dataset(capsys):
    code, out, err = run(capsys, ["eval", str(GOLDEN / "gt"), str(GOLDEN / "det")])
    assert code == 0
    report = json.loads(out)
    expected = json.loads((GOLDEN / "expected_report.json").read_text())
    assert report == expected
    assert report["tp"] == 2 and report["fp"] == 2
    assert report["recall"] == 2 / 3 and report["precision"] == 0.5
    assert "R=66.7% P=50.0% H=57.1%" in err


def test_eval_output_is_bit_stable(capsys):
    _, out1, _ = run(capsys, ["eval", str(GOLDEN / "gt"), str(GOLDEN / "det")])
    _, out2, _ = run(capsys, ["eval", str(GOLDEN / "gt"), str(GOLDEN / "det")])
    assert out1 == out2


def test_eval_empty_detections(tmp_path, capsys):
    gt = tmp_path / "gt"
    det = tmp_path / "det"
    gt.mkdir()
    det.mkdir()
    (gt / "img.txt").write_text("0,0,19,19\n", encoding="utf-8")
    code, out, _ = run(capsys, ["eval", str(gt), str(det)])
    assert code == 0
    report = json.loads(out)
    assert report["recall"] == 0.0 and report["tp"] == 0


def test_eval_perfect_detections(tmp_path, capsys):
    gt = tmp_path / "gt"
    det = tmp_path / "det"
    gt.mkdir()
    det.mkdir()
    (gt / "img.txt").write_text("0,0,18,18\n", encoding="utf-8")
    poly = interpolate_quad([(0, 0), (18, 0), (18, 18), (0, 18)])
    (det / "img.txt").write_text(
        serialize_detection(Detection(poly, 1.0)) + "\n", encoding="utf-8"
    )
    code, out, _ = run(capsys, ["eval", str(gt), str(det)])
    assert code == 0
    assert json.loads(out)["hmean"] == 1.0


def test_eval_key_mismatch_is_nonzero_exit(tmp_path, capsys):
    gt = tmp_path / "gt"
    det = tmp_path / "det"
    gt.mkdir()
    det.mkdir()
    poly = interpolate_quad([(0, 0), (18, 0), (18, 18), (0, 18)])
    (det / "phantom.txt").write_text(
        serialize_detection(Detection(poly, 1.0)) + "\n", encoding="utf-8"
    )
    code, _, err = run(capsys, ["eval", str(gt), str(det)])
    assert code == 2
    assert "phantom" in err


def test_eval_with_pnms_flag(tmp_path, capsys):
    gt = tmp_path / "gt"
    det = tmp_path / "det"
    gt.mkdir()
    det.mkdir()
    (gt / "img.txt").write_text("0,0,18,18\n", encoding="utf-8")
    poly = interpolate_quad([(0, 0), (18, 0), (18, 18), (0, 18)])
    near = interpolate_quad([(1, 0), (19, 0), (19, 18), (1, 18)])
    lines = [
        serialize_detection(Detection(poly, 0.9)),
        serialize_detection(Detection(near, 0.8)),
    ]
    (det / "img.txt").write_text("".join(l + "\n" for l in lines), encoding="utf-8")
    code, out, _ = run(capsys, ["eval", str(gt), str(det)])
    assert json.loads(out)["fp"] == 1  # duplicate counted without suppression
    code, out, _ = run(capsys, ["eval", str(gt), str(det), "--pnms"])
    assert json.loads(out)["fp"] == 0  # suppressed at the default 0.1 threshold


def test_pnms_command_files(tmp_path, capsys):
    rng = np.random.default_rng(73)
    det = tmp_path / "det"
    out = tmp_path / "out"
    det.mkdir()
    base = interpolate_quad([(0, 0), (18, 0), (18, 18), (0, 18)])
    overlapping = interpolate_quad([(1, 0), (19, 0), (19, 18), (1, 18)])
    disjoint = interpolate_quad([(50, 50), (68, 50), (68, 68), (50, 68)])
    bow = None
    while bow is None:
        pts = oracles.shuffled_polygon(rng, 14)
        try:
            cand = Polygon.from_pairs(pts)
        except ValueError:
            continue
        from curvetext.geometry import is_simple

        if not is_simple(cand):
            bow = cand
    lines = [
        serialize_detection(Detection(base, 0.9)),
        serialize_detection(Detection(overlapping, 0.8)),
        serialize_detection(Detection(disjoint, 0.7)),
        serialize_detection(Detection(bow, 0.99)),
    ]
    (det / "img.txt").write_text("".join(l + "\n" for l in lines), encoding="utf-8")
    code, out_json, err = run(capsys, ["pnms", str(det), str(out), "--pnms", "0.1"])
    assert code == 0
    payload = json.loads(out_json)
    assert payload == {"files": 1, "kept": 2, "dropped_non_simple": 1, "suppressed": 1}
    assert "img.txt:4" in err
    from curvetext.annotations import load_detection_file

    kept = load_detection_file(out / "img.txt")
    assert [d.score for d in kept] == [0.9, 0.7]


def test_stats_command(tmp_path, capsys):
    (tmp_path / "a.txt").write_text("0,0,12,6\n", encoding="utf-8")
    (tmp_path / "b.txt").write_text("", encoding="utf-8")
    code, out, _ = run(capsys, ["stats", str(tmp_path)])
    assert code == 0
    assert json.loads(out) == {"images": 2, "boxes": 1, "curve_boxes": 0}
