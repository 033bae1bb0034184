import json

import numpy as np
import pytest

from trackmerge.errors import ManifestError
from trackmerge.manifest import (
    Proposal,
    filter_proposals,
    load_manifest,
    save_manifest,
)
from trackmerge.mask import Mask
from trackmerge.synth import generate, random_scenario, save_scenario


def make_proposal(grid, objectness, dim=4, frame=0):
    m = Mask.from_dense(np.asarray(grid, bool))
    return Proposal(frame, m, m.bbox(), objectness, np.zeros(dim))


def block(w, h, x0, y0, x1, y1):
    g = np.zeros((h, w), bool)
    g[y0:y1, x0:x1] = True
    return g


MINIMAL = {
    "video_id": "v",
    "width": 4,
    "height": 3,
    "frame_count": 1,
    "embedding_dim": 2,
    "ground_truth": [{"object_id": 1, "rle": [0, 3, 9], "embedding": [1.0, 0.0]}],
    "frames": [[]],
    "flows": [],
}


class TestLoad:
    def test_minimal(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps(MINIMAL))
        m = load_manifest(path)
        assert m.frame_count == 1
        assert m.proposals == [[]]
        assert m.ground_truth[0].first_frame_mask.area == 3

    def test_embedding_length_mismatch(self, tmp_path):
        bad = json.loads(json.dumps(MINIMAL))
        bad["ground_truth"][0]["embedding"] = [1.0, 0.0, 0.0]
        path = tmp_path / "m.json"
        path.write_text(json.dumps(bad))
        with pytest.raises(ManifestError, match="embedding"):
            load_manifest(path)

    def test_bad_rle(self, tmp_path):
        bad = json.loads(json.dumps(MINIMAL))
        bad["ground_truth"][0]["rle"] = [5]
        path = tmp_path / "m.json"
        path.write_text(json.dumps(bad))
        with pytest.raises(ManifestError, match="rle"):
            load_manifest(path)

    def test_missing_flow_file(self, tmp_path):
        bad = json.loads(json.dumps(MINIMAL))
        bad["frame_count"] = 2
        bad["frames"] = [[], []]
        bad["flows"] = ["flows/00001.flo"]
        path = tmp_path / "m.json"
        path.write_text(json.dumps(bad))
        with pytest.raises(ManifestError, match="flow"):
            load_manifest(path)

    def test_wrong_bbox_rejected(self, tmp_path):
        bad = json.loads(json.dumps(MINIMAL))
        bad["frames"] = [
            [{"rle": [0, 3, 9], "bbox": [0, 0, 2, 3], "objectness": 0.5, "embedding": [0, 0]}]
        ]
        path = tmp_path / "m.json"
        path.write_text(json.dumps(bad))
        with pytest.raises(ManifestError, match="bbox"):
            load_manifest(path)

    def test_bbox_derived_when_omitted(self, tmp_path):
        ok = json.loads(json.dumps(MINIMAL))
        ok["frames"] = [[{"rle": [0, 3, 9], "objectness": 0.5, "embedding": [0, 0]}]]
        path = tmp_path / "m.json"
        path.write_text(json.dumps(ok))
        p = load_manifest(path).proposals[0][0]
        assert (p.bbox.x0, p.bbox.y0, p.bbox.x1, p.bbox.y1) == (0, 0, 1, 3)

    def test_synth_round_trip(self, tmp_path):
        result = generate(random_scenario(11))
        save_scenario(result, tmp_path)
        loaded = load_manifest(tmp_path / "manifest.json")
        save_manifest(loaded, tmp_path / "again.json")
        assert (tmp_path / "manifest.json").read_bytes() == (
            tmp_path / "again.json"
        ).read_bytes()


class TestFilter:
    def test_nms_at_threshold_suppresses(self):
        # IoU(a, b) = 36/48 = 0.75 >= 0.66: the lower-scored one goes
        a = make_proposal(block(10, 6, 0, 0, 7, 6), 0.9)
        b = make_proposal(block(10, 6, 1, 0, 8, 6), 0.8)
        from trackmerge.mask import iou

        assert iou(a.mask, b.mask) >= 0.66
        assert filter_proposals([a, b], 0.05, 0.66) == [a]

    def test_score_at_threshold_dropped(self):
        p = make_proposal(block(4, 4, 0, 0, 2, 2), 0.05)
        assert filter_proposals([p], 0.05, 0.66) == []

    def test_disjoint_both_kept(self):
        a = make_proposal(block(8, 4, 0, 0, 3, 4), 0.5)
        b = make_proposal(block(8, 4, 4, 0, 8, 4), 0.5)
        assert filter_proposals([a, b]) == [a, b]

    def test_output_sorted_descending(self):
        props = [
            make_proposal(block(20, 4, 5 * i, 0, 5 * i + 3, 4), s)
            for i, s in enumerate([0.3, 0.9, 0.6, 0.7])
        ]
        out = filter_proposals(props)
        assert [p.objectness for p in out] == [0.9, 0.7, 0.6, 0.3]

    def test_idempotent_random(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            props = []
            for _ in range(rng.integers(0, 10)):
                w = int(rng.integers(2, 6))
                x = int(rng.integers(0, 12 - w))
                props.append(
                    make_proposal(block(12, 6, x, 0, x + w, 6), float(rng.random()))
                )
            once = filter_proposals(props)
            assert filter_proposals(once) == once
            assert all(p in props for p in once)

    def test_surviving_pairs_below_threshold(self):
        from trackmerge.mask import iou

        rng = np.random.default_rng(9)
        for _ in range(20):
            props = []
            for _ in range(8):
                w = int(rng.integers(2, 8))
                x = int(rng.integers(0, 16 - w))
                props.append(
                    make_proposal(block(16, 6, x, 0, x + w, 6), float(rng.random()))
                )
            kept = filter_proposals(props, 0.05, 0.66)
            for i, a in enumerate(kept):
                for b in kept[i + 1 :]:
                    assert iou(a.mask, b.mask) < 0.66

    def test_equal_score_tie_by_index(self):
        a = make_proposal(block(8, 4, 0, 0, 4, 4), 0.5)
        b = make_proposal(block(8, 4, 1, 0, 5, 4), 0.5)  # IoU 3/5 < 0.66
        c = make_proposal(block(8, 4, 0, 0, 4, 4), 0.5)  # duplicate of a
        out = filter_proposals([a, b, c], 0.05, 0.66)
        assert out == [a, b]
