"""Binary masks stored as column-major run-length counts, plus the geometric
primitives (IoU, bounding box, boundary, dilation) everything else builds on.

The RLE layout is COCO-style uncompressed counts: the image is flattened
column by column (down each column first) and stored as alternating run
lengths starting with background, so a mask whose first pixel is foreground
begins with a zero-length background run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import MaskError


@dataclass(frozen=True)
class BBox:
    """Axis-aligned pixel box, x0/y0 inclusive, x1/y1 exclusive."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise MaskError(f"degenerate bbox {(self.x0, self.y0, self.x1, self.y1)}")
        if self.x0 < 0 or self.y0 < 0:
            raise MaskError("bbox coordinates must be non-negative")


class Mask:
    """Immutable binary mask of shape (height, width)."""

    __slots__ = ("width", "height", "runs", "_dense")

    def __init__(self, width, height, runs):
        if width <= 0 or height <= 0:
            raise MaskError(f"mask dimensions must be positive, got {width}x{height}")
        runs = tuple(int(r) for r in runs)
        if any(r < 0 for r in runs):
            raise MaskError("negative run length")
        if any(r == 0 for r in runs[1:]):
            raise MaskError("zero-length interior run (only the first run may be 0)")
        if sum(runs) != width * height:
            raise MaskError(
                f"runs sum to {sum(runs)}, expected {width * height} for {width}x{height}"
            )
        object.__setattr__(self, "width", int(width))
        object.__setattr__(self, "height", int(height))
        object.__setattr__(self, "runs", runs)
        object.__setattr__(self, "_dense", None)

    def __setattr__(self, name, value):
        raise AttributeError("Mask is immutable")

    def __eq__(self, other):
        if not isinstance(other, Mask):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.runs == other.runs
        )

    def __hash__(self):
        return hash((self.width, self.height, self.runs))

    def __reduce__(self):
        return (Mask, (self.width, self.height, self.runs))

    def __repr__(self):
        return f"Mask({self.width}x{self.height}, area={self.area})"

    @classmethod
    def from_dense(cls, bitmap) -> "Mask":
        """Encode a dense (height, width) boolean grid; canonical output."""
        arr = np.asarray(bitmap, dtype=bool)
        if arr.ndim != 2 or arr.size == 0:
            raise MaskError(f"bitmap must be a non-empty 2D grid, got shape {arr.shape}")
        h, w = arr.shape
        flat = arr.flatten(order="F")
        changes = np.flatnonzero(np.diff(flat)) + 1
        bounds = np.concatenate(([0], changes, [flat.size]))
        runs = np.diff(bounds).tolist()
        if flat[0]:
            runs = [0] + runs
        return cls(w, h, runs)

    @classmethod
    def empty(cls, width, height) -> "Mask":
        return cls(width, height, [width * height])

    @classmethod
    def full(cls, width, height) -> "Mask":
        return cls(width, height, [0, width * height])

    def dense(self) -> np.ndarray:
        """Decode to a dense (height, width) boolean grid (cached)."""
        if self._dense is None:
            values = np.arange(len(self.runs)) % 2 == 1
            flat = np.repeat(values, self.runs)
            grid = flat.reshape((self.height, self.width), order="F")
            grid.setflags(write=False)
            object.__setattr__(self, "_dense", grid)
        return self._dense

    @property
    def area(self) -> int:
        return int(sum(self.runs[1::2]))

    @property
    def is_empty(self) -> bool:
        return self.area == 0

    def bbox(self) -> BBox:
        """Tightest box containing all foreground pixels."""
        if self.is_empty:
            raise MaskError("empty mask has no bounding box")
        ys, xs = np.nonzero(self.dense())
        return BBox(int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)


def _check_same_shape(a: Mask, b: Mask):
    if a.width != b.width or a.height != b.height:
        raise MaskError(
            f"mask dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def intersection_area(a: Mask, b: Mask) -> int:
    """Pixel count of a AND b, computed directly on the run lengths."""
    _check_same_shape(a, b)
    ca = np.cumsum(a.runs)
    cb = np.cumsum(b.runs)
    ends = np.union1d(ca, cb)
    starts = np.concatenate(([0], ends[:-1]))
    lengths = ends - starts
    # run index parity: even runs are background, odd are foreground
    fa = np.searchsorted(ca, starts, side="right") % 2 == 1
    fb = np.searchsorted(cb, starts, side="right") % 2 == 1
    return int(lengths[fa & fb].sum())


def iou(a: Mask, b: Mask, empty_empty: float = 0.0) -> float:
    """Intersection over union.

    ``empty_empty`` sets the value when both masks are empty: 0 in scoring
    contexts (an empty selection earns no credit), 1 in evaluation contexts
    (a correctly-empty prediction is perfect).
    """
    _check_same_shape(a, b)
    inter = intersection_area(a, b)
    union = a.area + b.area - inter
    if union == 0:
        return float(empty_empty)
    return inter / union


def boundary(m: Mask) -> Mask:
    """Foreground pixels 4-adjacent to background or to the image border."""
    d = m.dense()
    padded = np.pad(d, 1, constant_values=False)
    interior = (
        padded[:-2, 1:-1]
        & padded[2:, 1:-1]
        & padded[1:-1, :-2]
        & padded[1:-1, 2:]
    )
    return Mask.from_dense(d & ~interior)


def dilate(m: Mask, radius: float) -> Mask:
    """Morphological dilation by a Euclidean disk (dx^2 + dy^2 <= r^2)."""
    if radius < 0:
        raise MaskError(f"dilation radius must be >= 0, got {radius}")
    if radius == 0 or m.is_empty:
        return m
    k = int(np.floor(radius))
    yy, xx = np.mgrid[-k : k + 1, -k : k + 1]
    footprint = yy * yy + xx * xx <= radius * radius
    return Mask.from_dense(ndimage.binary_dilation(m.dense(), structure=footprint))
