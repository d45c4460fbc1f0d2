"""Desk-scale numeric references for the detector head math.

Framework-free numpy implementations of the pieces a training stack would
provide: position-sensitive RoI pooling, bin voting with softmax, the
multi-task loss, and a forward-only bidirectional-LSTM pass over the 14
offset channels. No training, no gradients; weights are random or loaded
from a flat float32 file with a JSON shape manifest alongside. These exist
so shapes, invariants, and formulas can be checked without a GPU.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import EmptyPositives, NonFinite, ShapeMismatch


@dataclass(frozen=True)
class ScoreMapStack:
    """Score maps laid out [channels, height, width].

    For an offset branch channels = 14 * p^2 (14 targets, one p x p score map
    each); for the classification branch channels = (classes + 1) * p^2.
    Channel index for target t, bin row i, bin column j is t*p*p + i*p + j.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3:
            raise ShapeMismatch(f"score maps must be 3-D, got shape {data.shape}")
        if not np.isfinite(data).all():
            raise ValueError("score maps must be finite")
        object.__setattr__(self, "data", data)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]


class RoI(NamedTuple):
    """Integer half-open pixel window [x_min, x_max) x [y_min, y_max)."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int


def _bin_edges(extent: int, bins: int) -> list[tuple[int, int]]:
    # Even partition with remainder pixels absorbed by trailing bins; windows
    # narrower than the bin count replicate boundary pixels (bins share one
    # pixel each) so the pooling stays total.
    if extent >= bins:
        base, rem = divmod(extent, bins)
        edges = []
        start = 0
        for k in range(bins):
            size = base + (1 if k >= bins - rem else 0)
            edges.append((start, start + size))
            start += size
        return edges
    return [(k * extent // bins, k * extent // bins + 1) for k in range(bins)]


def psroi_pool(maps: ScoreMapStack, roi: RoI, p: int, targets: int) -> np.ndarray:
    """Position-sensitive average pooling of an RoI into [targets, p, p].

    The pooled value for target t at bin (i, j) is the mean of score map
    t*p*p + i*p + j over that bin's pixels inside the RoI.
    """
    data = maps.data
    if maps.channels != targets * p * p:
        raise ShapeMismatch(
            f"{maps.channels} channels cannot hold {targets} targets with p={p}"
        )
    if not (0 <= roi.x_min < roi.x_max <= maps.width
            and 0 <= roi.y_min < roi.y_max <= maps.height):
        raise ShapeMismatch(f"roi {roi} outside {maps.width}x{maps.height} map")
    rows = _bin_edges(roi.y_max - roi.y_min, p)
    cols = _bin_edges(roi.x_max - roi.x_min, p)
    out = np.empty((targets, p, p))
    for t in range(targets):
        for i, (y0, y1) in enumerate(rows):
            for j, (x0, x1) in enumerate(cols):
                channel = t * p * p + i * p + j
                window = data[
                    channel,
                    roi.y_min + y0: roi.y_min + y1,
                    roi.x_min + x0: roi.x_min + x1,
                ]
                out[t, i, j] = window.mean()
    return out


def vote(pooled: np.ndarray) -> np.ndarray:
    """Per-class mean over the p^2 bins followed by a stabilized softmax."""
    pooled = np.asarray(pooled, dtype=np.float64)
    if pooled.ndim != 3 or pooled.shape[1] != pooled.shape[2]:
        raise ShapeMismatch(f"expected [classes, p, p], got {pooled.shape}")
    means = pooled.mean(axis=(1, 2))
    shifted = means - means.max()
    exps = np.exp(shifted)
    return exps / exps.sum()


class LocLossKind:
    SMOOTH_L1 = "smooth_l1"
    SMOOTH_LN = "smooth_ln"


@dataclass(frozen=True)
class LossConfig:
    cls_weight: float = 3.0        # classification balance factor
    offset_weight: float = 1.0     # point-offset balance factor
    loc_loss_kind: str = LocLossKind.SMOOTH_L1
    num_proposals: int = 1         # positives + negatives in the batch
    num_positives: int = 1

    def __post_init__(self) -> None:
        if self.cls_weight < 0 or self.offset_weight < 0:
            raise ValueError("balance factors must be >= 0")
        if self.num_proposals <= 0:
            raise ValueError("num_proposals must be positive")
        if self.num_positives < 0 or self.num_positives > self.num_proposals:
            raise ValueError("need 0 <= num_positives <= num_proposals")
        if self.loc_loss_kind not in (LocLossKind.SMOOTH_L1, LocLossKind.SMOOTH_LN):
            raise ValueError(f"unknown localization loss {self.loc_loss_kind!r}")


def smooth_l1(d: np.ndarray) -> np.ndarray:
    d = np.abs(np.asarray(d, dtype=np.float64))
    return np.where(d < 1.0, 0.5 * d * d, d - 0.5)


def smooth_ln(d: np.ndarray) -> np.ndarray:
    d = np.abs(np.asarray(d, dtype=np.float64))
    return (d + 1.0) * np.log(d + 1.0) - d


def _loc_loss(pred, target, kind) -> float:
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeMismatch(f"loc shapes differ: {pred.shape} vs {target.shape}")
    if pred.size == 0:
        return 0.0
    f = smooth_l1 if kind == LocLossKind.SMOOTH_L1 else smooth_ln
    return float(f(pred - target).sum())


def cross_entropy(scores: np.ndarray, labels: np.ndarray) -> float:
    """Summed -log p of the true class; scores are probability rows."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.ndim != 2 or labels.shape != (scores.shape[0],):
        raise ShapeMismatch(f"scores {scores.shape} vs labels {labels.shape}")
    picked = scores[np.arange(scores.shape[0]), labels]
    return float(-np.log(np.clip(picked, 1e-300, None)).sum())


def multitask_loss(
    cls_scores: np.ndarray,
    cls_labels: np.ndarray,
    rect_pred: np.ndarray,
    rect_target: np.ndarray,
    width_pred: np.ndarray,
    width_target: np.ndarray,
    height_pred: np.ndarray,
    height_target: np.ndarray,
    cfg: LossConfig,
) -> float:
    """Joint score/box/offset loss.

    (cls_weight * L_cls + L_loc(rect)) / num_proposals
      + offset_weight * (L_loc(height) + L_loc(width)) / num_positives

    cls rows and rect rows cover all proposals; width/height rows cover the
    positive proposals only (negatives are never refined).
    """
    cls_scores = np.asarray(cls_scores, dtype=np.float64)
    rect_pred = np.asarray(rect_pred, dtype=np.float64)
    width_pred = np.asarray(width_pred, dtype=np.float64)
    height_pred = np.asarray(height_pred, dtype=np.float64)
    n, n_p = cfg.num_proposals, cfg.num_positives
    if cls_scores.shape[0] != n or rect_pred.shape != (n, 4):
        raise ShapeMismatch(
            f"expected {n} proposal rows, got cls {cls_scores.shape} rect {rect_pred.shape}"
        )
    if n_p == 0 and cfg.offset_weight > 0 and (width_pred.size or height_pred.size):
        raise EmptyPositives("offset rows supplied with zero positive proposals")
    for name, arr in (("width", width_pred), ("height", height_pred)):
        if arr.shape != (n_p, 14):
            raise ShapeMismatch(f"{name} offsets must be ({n_p}, 14), got {arr.shape}")

    total = (
        cfg.cls_weight * cross_entropy(cls_scores, cls_labels)
        + _loc_loss(rect_pred, rect_target, cfg.loc_loss_kind)
    ) / n
    if n_p > 0:
        total += (cfg.offset_weight / n_p) * (
            _loc_loss(height_pred, height_target, cfg.loc_loss_kind)
            + _loc_loss(width_pred, width_target, cfg.loc_loss_kind)
        )
    if not math.isfinite(total):
        raise NonFinite("loss overflowed")
    return float(total)


# ---------------------------------------------------------------------------
# forward-only bidirectional LSTM over the 14 offset channels
# ---------------------------------------------------------------------------

SEQUENCE_LENGTH = 14
HIDDEN_SIZE = 256


@dataclass(frozen=True)
class LstmDirection:
    """One direction's parameters; gate rows ordered (input, forget, cell, output)."""

    w_x: np.ndarray   # [4*hidden, input_dim]
    w_h: np.ndarray   # [4*hidden, hidden]
    bias: np.ndarray  # [4*hidden]

    def __post_init__(self) -> None:
        w_x = np.asarray(self.w_x, dtype=np.float64)
        w_h = np.asarray(self.w_h, dtype=np.float64)
        bias = np.asarray(self.bias, dtype=np.float64)
        four_h = w_x.shape[0]
        if four_h % 4 != 0 or w_h.shape != (four_h, four_h // 4) or bias.shape != (four_h,):
            raise ShapeMismatch("inconsistent LSTM parameter shapes")
        for arr in (w_x, w_h, bias):
            if not np.isfinite(arr).all():
                raise ValueError("LSTM parameters must be finite")
        object.__setattr__(self, "w_x", w_x)
        object.__setattr__(self, "w_h", w_h)
        object.__setattr__(self, "bias", bias)

    @property
    def hidden(self) -> int:
        return self.w_x.shape[0] // 4

    @property
    def input_dim(self) -> int:
        return self.w_x.shape[1]


@dataclass(frozen=True)
class BlstmWeights:
    forward: LstmDirection
    backward: LstmDirection
    pool: np.ndarray  # [hidden] kernel collapsing each timestep to one offset

    def __post_init__(self) -> None:
        pool = np.asarray(self.pool, dtype=np.float64)
        if self.forward.hidden != self.backward.hidden:
            raise ShapeMismatch("direction hidden sizes differ")
        if self.forward.input_dim != self.backward.input_dim:
            raise ShapeMismatch("direction input sizes differ")
        if pool.shape != (self.forward.hidden,):
            raise ShapeMismatch(f"pool kernel must be ({self.forward.hidden},)")
        if not np.isfinite(pool).all():
            raise ValueError("pool kernel must be finite")
        object.__setattr__(self, "pool", pool)

    @property
    def hidden(self) -> int:
        return self.forward.hidden

    @property
    def input_dim(self) -> int:
        return self.forward.input_dim

    @classmethod
    def random(
        cls,
        rng: np.random.Generator,
        hidden: int = HIDDEN_SIZE,
        input_dim: int = 49,
        scale: float = 0.1,
    ) -> "BlstmWeights":
        def direction():
            return LstmDirection(
                rng.normal(0, scale, (4 * hidden, input_dim)),
                rng.normal(0, scale, (4 * hidden, hidden)),
                rng.normal(0, scale, 4 * hidden),
            )

        return cls(direction(), direction(), rng.normal(0, scale, hidden))

    def swapped(self) -> "BlstmWeights":
        return BlstmWeights(self.backward, self.forward, self.pool)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def _run_direction(seq: np.ndarray, d: LstmDirection) -> np.ndarray:
    h = np.zeros(d.hidden)
    c = np.zeros(d.hidden)
    hs = np.empty((seq.shape[0], d.hidden))
    H = d.hidden
    for t in range(seq.shape[0]):
        gates = d.w_x @ seq[t] + d.w_h @ h + d.bias
        i = _sigmoid(gates[0:H])
        f = _sigmoid(gates[H:2 * H])
        g = np.tanh(gates[2 * H:3 * H])
        o = _sigmoid(gates[3 * H:4 * H])
        c = f * c + i * g
        h = o * np.tanh(c)
        hs[t] = h
    return hs


def tloc_forward(offset_features: np.ndarray, weights: BlstmWeights) -> np.ndarray:
    """One offset value per timestep from a bidirectional pass.

    The forward and backward 256-d hidden outputs at each timestep are
    averaged, then collapsed by the pooling kernel. Input must be the
    [14, p^2] per-point feature block from the pooled offset score maps.
    """
    seq = np.asarray(offset_features, dtype=np.float64)
    if seq.ndim != 2 or seq.shape[0] != SEQUENCE_LENGTH:
        raise ShapeMismatch(f"expected [{SEQUENCE_LENGTH}, p^2] features, got {seq.shape}")
    if seq.shape[1] != weights.input_dim:
        raise ShapeMismatch(
            f"feature width {seq.shape[1]} != weight input dim {weights.input_dim}"
        )
    fwd = _run_direction(seq, weights.forward)
    bwd = _run_direction(seq[::-1], weights.backward)[::-1]
    combined = 0.5 * (fwd + bwd)
    out = combined @ weights.pool
    if not np.isfinite(out).all():
        raise NonFinite("recurrent pass overflowed")
    return out


# ---------------------------------------------------------------------------
# weight file I/O: flat little-endian float32 stream + JSON shape manifest
# ---------------------------------------------------------------------------

_WEIGHT_FIELDS = (
    "forward.w_x", "forward.w_h", "forward.bias",
    "backward.w_x", "backward.w_h", "backward.bias",
    "pool",
)


def _get_field(w: BlstmWeights, name: str) -> np.ndarray:
    obj = w
    for part in name.split("."):
        obj = getattr(obj, part)
    return obj


def save_weights(w: BlstmWeights, path: str | Path) -> None:
    path = Path(path)
    arrays = [_get_field(w, name) for name in _WEIGHT_FIELDS]
    flat = np.concatenate([a.astype("<f4").ravel() for a in arrays])
    path.write_bytes(flat.tobytes())
    manifest = [
        {"name": name, "shape": list(_get_field(w, name).shape)}
        for name in _WEIGHT_FIELDS
    ]
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(manifest, indent=2), encoding="utf-8"
    )


def load_weights(path: str | Path) -> BlstmWeights:
    path = Path(path)
    manifest = json.loads(path.with_suffix(path.suffix + ".json").read_text(encoding="utf-8"))
    raw = np.frombuffer(path.read_bytes(), dtype="<f4").astype(np.float64)
    arrays = {}
    cursor = 0
    for entry in manifest:
        size = int(np.prod(entry["shape"]))
        arrays[entry["name"]] = raw[cursor:cursor + size].reshape(entry["shape"])
        cursor += size
    if cursor != raw.size:
        raise ShapeMismatch(f"weight stream has {raw.size} floats, manifest covers {cursor}")
    return BlstmWeights(
        LstmDirection(arrays["forward.w_x"], arrays["forward.w_h"], arrays["forward.bias"]),
        LstmDirection(arrays["backward.w_x"], arrays["backward.w_h"], arrays["backward.bias"]),
        arrays["pool"],
    )
