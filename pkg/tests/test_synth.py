import numpy as np
import pytest

from trackmerge.errors import TrackmergeError
from trackmerge.flow import warp_mask
from trackmerge.manifest import load_manifest, save_manifest
from trackmerge.merging import greedy_merge
from trackmerge.metrics import evaluate
from trackmerge.search import sample_simplex
from trackmerge.synth import (
    ScenarioSpec,
    ShapeSpec,
    crossing_scenario,
    generate,
    random_scenario,
    save_scenario,
    single_object_scenario,
)


class TestGenerate:
    def test_flow_transports_gt_exactly(self):
        for seed in range(6):
            result = generate(random_scenario(seed, noise=0.0))
            m = result.manifest
            for t in range(1, m.frame_count):
                for j in m.object_ids:
                    warped = warp_mask(result.gt_all_frames[t - 1][j], m.flow(t))
                    assert warped == result.gt_all_frames[t][j], f"seed {seed} t {t}"

    def test_manifests_pass_validation(self, tmp_path):
        for seed in (0, 5, 9):
            result = generate(random_scenario(seed))
            save_scenario(result, tmp_path / str(seed))
            load_manifest(tmp_path / str(seed) / "manifest.json")

    def test_same_seed_byte_identical_manifest(self, tmp_path):
        spec = random_scenario(17)
        save_manifest(generate(spec).manifest, tmp_path / "a.json")
        save_manifest(generate(spec).manifest, tmp_path / "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_single_clean_object_any_weights(self):
        result = generate(single_object_scenario(3))
        rng = np.random.default_rng(0)
        for _ in range(4):
            ts = greedy_merge(result.manifest, sample_simplex(rng))
            assert evaluate(ts.label_maps, result.gt_all_frames).j_mean == 1.0

    def test_oversized_object_rejected(self):
        with pytest.raises(TrackmergeError):
            ScenarioSpec(
                seed=0,
                frame_count=2,
                width=8,
                height=8,
                objects=(ShapeSpec("rect", (10, 2), (0, 0), (0, 0)),),
            )

    def test_escaping_trajectory_rejected(self):
        with pytest.raises(TrackmergeError):
            ScenarioSpec(
                seed=0,
                frame_count=5,
                width=8,
                height=8,
                objects=(ShapeSpec("rect", (3, 3), (4, 0), (2, 0)),),
            )

    def test_crossing_confuses_appearance_only_merging(self):
        result = generate(crossing_scenario())
        reid_only = greedy_merge(
            result.manifest, active=(False, True, False, True, False)
        )
        all_five = greedy_merge(result.manifest)
        jf_reid = evaluate(reid_only.label_maps, result.gt_all_frames).jf_mean
        jf_all = evaluate(all_five.label_maps, result.gt_all_frames).jf_mean
        assert jf_reid < jf_all

    def test_ellipse_shape(self):
        spec = ScenarioSpec(
            seed=0,
            frame_count=2,
            width=12,
            height=12,
            objects=(ShapeSpec("ellipse", (6, 4), (2, 3), (1, 0)),),
        )
        result = generate(spec)
        m = result.gt_all_frames[0][1]
        assert 0 < m.area < 24  # inside the 6x4 bounding box
