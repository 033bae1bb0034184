import numpy as np
import pytest

from trackmerge.errors import MaskError
from trackmerge.mask import BBox, Mask, boundary, dilate, intersection_area, iou


def random_mask(rng, w=16, h=16, p=0.4):
    return Mask.from_dense(rng.random((h, w)) < p)


class TestRLE:
    def test_all_background(self):
        assert Mask.from_dense(np.zeros((2, 2), bool)).runs == (4,)

    def test_all_foreground(self):
        assert Mask.from_dense(np.ones((2, 2), bool)).runs == (0, 4)

    def test_single_pixel_column_major(self):
        grid = np.zeros((3, 3), bool)
        grid[0, 0] = True
        assert Mask.from_dense(grid).runs == (0, 1, 8)

    def test_round_trip_random(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            grid = rng.random((rng.integers(1, 12), rng.integers(1, 12))) < rng.random()
            m = Mask.from_dense(grid)
            assert np.array_equal(m.dense(), grid)

    def test_bad_run_total(self):
        with pytest.raises(MaskError):
            Mask(2, 2, [3])

    def test_zero_interior_run(self):
        with pytest.raises(MaskError):
            Mask(2, 2, [1, 0, 3])

    def test_leading_zero_allowed(self):
        m = Mask(2, 2, [0, 4])
        assert m.area == 4


class TestIoU:
    def test_identity(self):
        rng = np.random.default_rng(2)
        m = random_mask(rng)
        assert iou(m, m) == 1.0

    def test_disjoint(self):
        a = np.zeros((4, 4), bool)
        b = np.zeros((4, 4), bool)
        a[0, 0] = True
        b[3, 3] = True
        assert iou(Mask.from_dense(a), Mask.from_dense(b)) == 0.0

    def test_hand_counted_columns(self):
        # A = columns 0-1, B = columns 1-2 on a 4x4 grid: 4 / 12
        a = np.zeros((4, 4), bool)
        b = np.zeros((4, 4), bool)
        a[:, 0:2] = True
        b[:, 1:3] = True
        assert iou(Mask.from_dense(a), Mask.from_dense(b)) == pytest.approx(4 / 12)

    def test_empty_empty_conventions(self):
        e = Mask.empty(3, 3)
        assert iou(e, e, empty_empty=0.0) == 0.0
        assert iou(e, e, empty_empty=1.0) == 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(MaskError):
            iou(Mask.empty(2, 2), Mask.empty(3, 3))

    def test_rle_matches_dense_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            a = random_mask(rng, p=rng.random())
            b = random_mask(rng, p=rng.random())
            inter = np.logical_and(a.dense(), b.dense()).sum()
            union = np.logical_or(a.dense(), b.dense()).sum()
            expected = inter / union if union else 0.0
            assert iou(a, b) == pytest.approx(expected, abs=1e-15)
            assert intersection_area(a, b) == inter

    def test_symmetric_and_bounded(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            a = random_mask(rng)
            b = random_mask(rng)
            v = iou(a, b)
            assert 0.0 <= v <= 1.0
            assert v == iou(b, a)


class TestBoundary:
    def test_empty(self):
        assert boundary(Mask.empty(5, 5)).is_empty

    def test_single_pixel(self):
        grid = np.zeros((5, 5), bool)
        grid[2, 2] = True
        m = Mask.from_dense(grid)
        assert boundary(m) == m

    def test_solid_block_ring(self):
        grid = np.zeros((8, 8), bool)
        grid[2:6, 2:6] = True
        ring = boundary(Mask.from_dense(grid))
        assert ring.area == 12
        inner = np.zeros((8, 8), bool)
        inner[3:5, 3:5] = True
        assert not np.logical_and(ring.dense(), inner).any()

    def test_border_pixels_count(self):
        m = Mask.full(3, 3)
        assert boundary(m).area == 8  # center pixel is interior

    def test_subset_of_mask(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            m = random_mask(rng)
            assert not (boundary(m).dense() & ~m.dense()).any()


class TestDilate:
    def test_radius_zero_identity(self):
        rng = np.random.default_rng(6)
        m = random_mask(rng)
        assert dilate(m, 0) == m

    def test_plus_shape(self):
        grid = np.zeros((5, 5), bool)
        grid[2, 2] = True
        d = dilate(Mask.from_dense(grid), 1)
        expected = np.zeros((5, 5), bool)
        expected[2, 1:4] = True
        expected[1:4, 2] = True
        assert np.array_equal(d.dense(), expected)

    def test_empty_stays_empty(self):
        assert dilate(Mask.empty(4, 4), 3).is_empty

    def test_euclidean_disk_oracle(self):
        # brute-force distance check on a single seed point
        grid = np.zeros((11, 11), bool)
        grid[5, 5] = True
        for r in (1, 2, 2.5, 3):
            d = dilate(Mask.from_dense(grid), r).dense()
            yy, xx = np.mgrid[0:11, 0:11]
            expected = (yy - 5) ** 2 + (xx - 5) ** 2 <= r * r
            assert np.array_equal(d, expected)

    def test_monotone(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            m = random_mask(rng, p=0.2)
            d1 = dilate(m, 1)
            d2 = dilate(m, 2)
            assert not (m.dense() & ~d1.dense()).any()
            assert not (d1.dense() & ~d2.dense()).any()


class TestBBox:
    def test_tight(self):
        grid = np.zeros((6, 8), bool)
        grid[2, 3] = True
        grid[4, 5] = True
        assert Mask.from_dense(grid).bbox() == BBox(3, 2, 6, 5)

    def test_empty_rejected(self):
        with pytest.raises(MaskError):
            Mask.empty(4, 4).bbox()

    def test_degenerate_rejected(self):
        with pytest.raises(MaskError):
            BBox(2, 2, 2, 3)
