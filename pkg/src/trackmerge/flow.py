"""Middlebury .flo reading/writing and backward-flow mask warping."""

from __future__ import annotations

import struct

import numpy as np

from .errors import FlowError, MaskError
from .mask import Mask

FLO_MAGIC = 202021.25


class FlowField:
    """Dense per-pixel (dx, dy) displacements, float32, row-major.

    Used as a backward field: the vector at pixel (x, y) of frame t points to
    the source location (x + dx, y + dy) in frame t-1.
    """

    __slots__ = ("width", "height", "vectors")

    def __init__(self, width, height, vectors):
        vectors = np.ascontiguousarray(vectors, dtype=np.float32)
        if width <= 0 or height <= 0:
            raise FlowError(f"flow dimensions must be positive, got {width}x{height}")
        if vectors.shape != (height, width, 2):
            raise FlowError(
                f"flow grid shape {vectors.shape} does not match {width}x{height}"
            )
        if not np.isfinite(vectors).all():
            raise FlowError("flow field contains non-finite values")
        vectors.setflags(write=False)
        object.__setattr__(self, "width", int(width))
        object.__setattr__(self, "height", int(height))
        object.__setattr__(self, "vectors", vectors)

    def __setattr__(self, name, value):
        raise AttributeError("FlowField is immutable")

    def __reduce__(self):
        return (FlowField, (self.width, self.height, np.array(self.vectors)))

    @classmethod
    def zero(cls, width, height) -> "FlowField":
        return cls(width, height, np.zeros((height, width, 2), np.float32))


def load_flo(path) -> FlowField:
    """Read a Middlebury .flo file (magic 202021.25, LE int32 w/h, LE f32 data)."""
    with open(path, "rb") as f:
        header = f.read(12)
        if len(header) < 12:
            raise FlowError(f"truncated .flo header in {path}")
        magic, w, h = struct.unpack("<fii", header)
        if magic != FLO_MAGIC:
            raise FlowError(f"bad .flo magic {magic!r} in {path}")
        if w <= 0 or h <= 0:
            raise FlowError(f"bad .flo dimensions {w}x{h} in {path}")
        payload = f.read()
    expected = w * h * 2 * 4
    if len(payload) != expected:
        raise FlowError(
            f"truncated .flo payload in {path}: {len(payload)} bytes, expected {expected}"
        )
    data = np.frombuffer(payload, dtype="<f4").reshape((h, w, 2))
    if not np.isfinite(data).all():
        raise FlowError(f"non-finite flow values in {path}")
    return FlowField(w, h, data)


def save_flo(field: FlowField, path):
    """Write a .flo file; load_flo(save_flo(f)) is byte-identical."""
    with open(path, "wb") as f:
        f.write(struct.pack("<fii", FLO_MAGIC, field.width, field.height))
        f.write(np.ascontiguousarray(field.vectors, dtype="<f4").tobytes())


def _round_half_away(v: np.ndarray) -> np.ndarray:
    # deterministic round-half-away-from-zero, per coordinate
    return np.trunc(v + np.copysign(0.5, v))


def warp_mask(m: Mask, backward_flow: FlowField) -> Mask:
    """Warp a frame t-1 mask into frame t by sampling along the backward flow.

    Output pixel (x, y) is foreground iff its rounded source location
    (x + dx, y + dy) lies inside the image and is foreground in ``m``;
    out-of-bounds samples are background.
    """
    if m.width != backward_flow.width or m.height != backward_flow.height:
        raise MaskError(
            f"mask {m.width}x{m.height} does not match flow "
            f"{backward_flow.width}x{backward_flow.height}"
        )
    h, w = m.height, m.width
    ys, xs = np.mgrid[0:h, 0:w]
    sx = _round_half_away(xs + backward_flow.vectors[:, :, 0].astype(np.float64))
    sy = _round_half_away(ys + backward_flow.vectors[:, :, 1].astype(np.float64))
    inside = (sx >= 0) & (sx < w) & (sy >= 0) & (sy < h)
    out = np.zeros((h, w), dtype=bool)
    src = m.dense()
    out[inside] = src[sy[inside].astype(np.intp), sx[inside].astype(np.intp)]
    return Mask.from_dense(out)
