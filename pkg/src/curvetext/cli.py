"""Command-line entry point.

Machine-readable JSON goes to stdout, human summaries to stderr. Exit codes:
0 success, 1 validation failures found, 2 usage or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .annotations import (
    Annotation,
    ShapeKind,
    atomic_write_text,
    dataset_stats,
    load_annotation_dir,
    load_detection_dir,
    parse_annotation_line,
    parse_detection_line,
    serialize_annotation,
    serialize_detection,
    validate_annotation_text,
)
from .errors import CurveTextError
from .evaluation import Subset, evaluate
from .geometry import is_simple
from .suppression import OverlapMode, SuppressionConfig, nps, pnms

SUBSETS = {
    "whole": Subset.WHOLE,
    "curve": Subset.CURVE_ONLY,
    "noncurve": Subset.NONCURVE_ONLY,
}
MODES = {"pnms": OverlapMode.PNMS, "rect_nms": OverlapMode.RECT_NMS}


def _emit(payload) -> None:
    print(json.dumps(payload, indent=2))


def _require_dir(path) -> Path:
    path = Path(path)
    if not path.is_dir():
        raise FileNotFoundError(f"directory {path} does not exist")
    return path


def cmd_validate(args) -> int:
    directory = _require_dir(args.annotation_dir)
    violations = []
    files = 0
    for path in sorted(directory.glob("*.txt")):
        files += 1
        for item in validate_annotation_text(path.read_text(encoding="utf-8")):
            violations.append({"file": str(path), **item})
    _emit({"files": files, "violations": violations})
    print(
        f"checked {files} files: "
        + ("clean" if not violations else f"{len(violations)} violations"),
        file=sys.stderr,
    )
    for v in violations:
        print(f"{v['file']}:{v['line']}: {v['message']}", file=sys.stderr)
    return 0 if not violations else 1


def cmd_interp(args) -> int:
    in_dir = _require_dir(args.input_dir)
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    converted = 0
    files = 0
    for path in sorted(in_dir.glob("*.txt")):
        files += 1
        out_lines = []
        for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not raw.strip():
                continue
            try:
                ann = parse_annotation_line(raw)
            except CurveTextError as exc:
                raise type(exc)(f"{path}:{lineno}: {exc}") from exc
            if ann.shape_kind is ShapeKind.CURVE:
                out_lines.append(raw)
            else:
                lifted = Annotation(ann.polygon, ShapeKind.CURVE, ann.care)
                out_lines.append(serialize_annotation(lifted))
                converted += 1
        atomic_write_text(out_dir / path.name, "".join(l + "\n" for l in out_lines))
    _emit({"files": files, "converted": converted})
    print(f"converted {converted} regions in {files} files", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    gt = load_annotation_dir(_require_dir(args.gt_dir))
    dets = {stem: nps(d) for stem, d in load_detection_dir(_require_dir(args.det_dir)).items()}
    if args.pnms is not None:
        cfg = SuppressionConfig(args.pnms, MODES[args.mode])
        dets = {stem: pnms(d, cfg) for stem, d in dets.items()}
    report = evaluate(gt, dets, args.iou, SUBSETS[args.subset])
    _emit(report.as_dict())
    print(report.summary(), file=sys.stderr)
    return 0


def cmd_pnms(args) -> int:
    in_dir = _require_dir(args.det_dir)
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = SuppressionConfig(args.pnms, MODES[args.mode])
    files = kept_total = dropped = suppressed = 0
    for path in sorted(in_dir.glob("*.txt")):
        files += 1
        dets = []
        for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not raw.strip():
                continue
            det = parse_detection_line(raw)
            if not is_simple(det.polygon):
                print(f"{path}:{lineno}: non-simple polygon dropped", file=sys.stderr)
                dropped += 1
                continue
            dets.append(det)
        kept = pnms(dets, cfg)
        suppressed += len(dets) - len(kept)
        kept_total += len(kept)
        atomic_write_text(
            out_dir / path.name, "".join(serialize_detection(d) + "\n" for d in kept)
        )
    _emit({
        "files": files,
        "kept": kept_total,
        "dropped_non_simple": dropped,
        "suppressed": suppressed,
    })
    return 0


def cmd_stats(args) -> int:
    stats = dataset_stats(load_annotation_dir(_require_dir(args.annotation_dir)))
    _emit(stats.as_dict())
    return 0


def cmd_serve(args) -> int:
    from .server import AnnotationService, make_server

    service = AnnotationService(args.image_dir, args.annotation_dir, args.static_dir)
    httpd = make_server(service, args.port, args.host)
    print(
        f"serving on http://{args.host}:{httpd.server_address[1]}",
        file=sys.stderr,
        flush=True,
    )
    try:
        httpd.serve_forever()
    finally:
        httpd.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvetext",
        description="Curve scene-text geometry, annotation and evaluation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="audit annotation files for format and simplicity")
    p.add_argument("annotation_dir")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("interp", help="lift rect/quad lines to canonical 32-value curve lines")
    p.add_argument("input_dir")
    p.add_argument("output_dir")
    p.set_defaults(func=cmd_interp)

    p = sub.add_parser("eval", help="score detections against ground truth")
    p.add_argument("gt_dir")
    p.add_argument("det_dir")
    p.add_argument("--iou", type=float, default=0.5, help="match threshold (default 0.5)")
    p.add_argument(
        "--pnms", type=float, nargs="?", const=0.1, default=None,
        help="run polygonal NMS before scoring (default threshold 0.1)",
    )
    p.add_argument("--mode", choices=sorted(MODES), default="pnms")
    p.add_argument("--subset", choices=sorted(SUBSETS), default="whole")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pnms", help="suppress detection files on disk")
    p.add_argument("det_dir")
    p.add_argument("output_dir")
    p.add_argument("--pnms", type=float, default=0.1, help="suppression threshold")
    p.add_argument("--mode", choices=sorted(MODES), default="pnms")
    p.set_defaults(func=cmd_pnms)

    p = sub.add_parser("stats", help="dataset statistics as JSON")
    p.add_argument("annotation_dir")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="serve the labeling UI and annotation API")
    p.add_argument("image_dir")
    p.add_argument("annotation_dir")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static-dir", default=None)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CurveTextError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
