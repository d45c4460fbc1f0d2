"""HTTP backend for the labeling UI.

Serves the image list and bytes, reads/writes per-image annotation files, and
hosts the static UI bundle. Every annotation POST is validated with the same
parser the batch tools use and persisted with an atomic temp-file + rename,
so concurrent clients and crashes never leave a truncated file. Writes to the
same image stem are serialized by a per-stem lock.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .annotations import atomic_write_text, validate_annotation_text

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".gif", ".bmp", ".webp"}
DEFAULT_STATIC_DIR = Path(__file__).parent / "static"


class AnnotationService:
    """Filesystem state shared by all request handler threads."""

    def __init__(self, image_dir, annotation_dir, static_dir=None):
        self.image_dir = Path(image_dir)
        self.annotation_dir = Path(annotation_dir)
        self.static_dir = Path(static_dir) if static_dir else DEFAULT_STATIC_DIR
        if not self.image_dir.is_dir():
            raise NotADirectoryError(f"image directory {self.image_dir} does not exist")
        if not self.annotation_dir.is_dir():
            raise NotADirectoryError(
                f"annotation directory {self.annotation_dir} does not exist"
            )
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def list_images(self) -> list[str]:
        return sorted(
            p.name
            for p in self.image_dir.iterdir()
            if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
        )

    def image_path(self, name: str) -> Path | None:
        if Path(name).name != name:
            return None
        path = self.image_dir / name
        if path.is_file() and path.suffix.lower() in IMAGE_SUFFIXES:
            return path
        return None

    def stem_known(self, stem: str) -> bool:
        return any(Path(name).stem == stem for name in self.list_images())

    def read_annotations(self, stem: str) -> str:
        path = self.annotation_dir / f"{stem}.txt"
        return path.read_text(encoding="utf-8") if path.is_file() else ""

    def write_annotations(self, stem: str, text: str) -> None:
        with self._locks_guard:
            lock = self._locks.setdefault(stem, threading.Lock())
        with lock:
            atomic_write_text(self.annotation_dir / f"{stem}.txt", text)


class _Handler(BaseHTTPRequestHandler):
    service: AnnotationService  # injected by make_server

    def log_message(self, fmt, *args):
        logger.debug("%s %s", self.address_string(), fmt % args)

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, payload) -> None:
        self._send(status, json.dumps(payload).encode("utf-8"), "application/json")

    def do_GET(self):  # noqa: N802 (stdlib handler API)
        path = self.path.split("?", 1)[0]
        svc = self.service
        if path == "/images":
            self._send_json(200, svc.list_images())
            return
        if path.startswith("/images/"):
            image = svc.image_path(path[len("/images/"):])
            if image is None:
                self._send_json(404, {"error": "unknown image"})
                return
            ctype = mimetypes.guess_type(image.name)[0] or "application/octet-stream"
            self._send(200, image.read_bytes(), ctype)
            return
        if path.startswith("/annotations/"):
            stem = path[len("/annotations/"):]
            if not svc.stem_known(stem):
                self._send_json(404, {"error": "unknown image"})
                return
            self._send(200, svc.read_annotations(stem).encode("utf-8"), "text/plain; charset=utf-8")
            return
        self._serve_static("index.html" if path == "/" else path.lstrip("/"))

    def _serve_static(self, name: str) -> None:
        if Path(name).name != name:
            self._send_json(404, {"error": "not found"})
            return
        path = self.service.static_dir / name
        if not path.is_file():
            self._send_json(404, {"error": "not found"})
            return
        ctype = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
        self._send(200, path.read_bytes(), ctype)

    def do_POST(self):  # noqa: N802
        path = self.path.split("?", 1)[0]
        svc = self.service
        if not path.startswith("/annotations/"):
            self._send_json(404, {"error": "not found"})
            return
        stem = path[len("/annotations/"):]
        if not svc.stem_known(stem):
            self._send_json(404, {"error": "unknown image"})
            return
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length).decode("utf-8")
        violations = validate_annotation_text(body)
        if violations:
            self._send_json(400, {"errors": violations})
            return
        svc.write_annotations(stem, body)
        lines = sum(1 for l in body.splitlines() if l.strip())
        self._send_json(200, {"ok": True, "lines": lines})


def make_server(service: AnnotationService, port: int, host: str = "127.0.0.1") -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)


def serve_forever(image_dir, annotation_dir, port: int, host: str = "127.0.0.1",
                  static_dir=None) -> None:
    service = AnnotationService(image_dir, annotation_dir, static_dir)
    httpd = make_server(service, port, host)
    logger.info("serving on http://%s:%d", host, port)
    try:
        httpd.serve_forever()
    finally:
        httpd.server_close()
