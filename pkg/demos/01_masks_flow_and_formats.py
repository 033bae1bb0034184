"""Masks, optical flow, and the on-disk formats.

Walks through the two core data types: run-length encoded binary masks and
dense flow fields, plus the warping operation that connects them.
"""

import tempfile
from pathlib import Path

import numpy as np

from trackmerge import FlowField, Mask, boundary, dilate, iou, load_flo, save_flo, warp_mask

# A mask is stored as column-major run lengths starting with background.
# This 3x3 grid with a single set pixel at the top-left corner encodes as
# [0, 1, 8]: zero background pixels, one foreground, eight background.
grid = np.zeros((3, 3), bool)
grid[0, 0] = True
m = Mask.from_dense(grid)
print("runs for corner pixel:", list(m.runs))

# IoU works directly on the run-length form, no decoding needed.
a = Mask.from_dense(np.pad(np.ones((2, 4), bool), ((0, 2), (0, 4))))
b = Mask.from_dense(np.pad(np.ones((2, 4), bool), ((0, 2), (2, 2))))
print("overlap of two shifted bars:", iou(a, b))  # 4 / 12

# Boundary and dilation are the building blocks of the contour metric.
sq = Mask.from_dense(np.pad(np.ones((4, 4), bool), 2))
print("boundary pixels of a 4x4 square:", boundary(sq).area)
print("after dilating by radius 1:", dilate(sq, 1).area)

# Flow fields round-trip through the little-endian .flo format byte for byte.
rng = np.random.default_rng(0)
field = FlowField(6, 4, rng.standard_normal((4, 6, 2)).astype(np.float32))
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "demo.flo"
    save_flo(field, path)
    again = load_flo(path)
    print("flow round trip identical:", np.array_equal(field.vectors, again.vectors))

# Warping follows the flow backwards: each output pixel samples the source
# at (x + dx, y + dy), nearest neighbor. A uniform flow of dx = -1 therefore
# shifts the mask one pixel to the right.
bar = Mask.from_dense(np.pad(np.ones((4, 2), bool), ((0, 0), (0, 4))))
shift = FlowField(6, 4, np.full((4, 6, 2), (-1.0, 0.0), np.float32))
print("bar bbox before:", bar.bbox())
print("bar bbox after warp:", warp_mask(bar, shift).bbox())
