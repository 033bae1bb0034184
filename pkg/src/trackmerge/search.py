"""Random search over the five merging weights: uniform samples on the
probability simplex, evaluated by merging + benchmark scoring, with the
equal-weights vector always force-included as candidate 0."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import TrackmergeError
from .merging import greedy_merge
from .metrics import evaluate
from .scoring import WeightVector

OBJECTIVES = ("jf_mean", "j_mean", "f_mean")


@dataclass(frozen=True)
class SearchConfig:
    sample_count: int = 25000
    seed: int = 0
    top_k: int = 11
    objective: str = "jf_mean"

    def __post_init__(self):
        if self.sample_count < 1:
            raise TrackmergeError("sample_count must be positive")
        if not (1 <= self.top_k <= self.sample_count):
            raise TrackmergeError("top_k must lie in [1, sample_count]")
        if self.objective not in OBJECTIVES:
            raise TrackmergeError(f"objective must be one of {OBJECTIVES}")


@dataclass
class SearchResult:
    """Candidates ranked by objective (non-increasing; ties keep sampling order)."""

    ranked: list  # list of (candidate_index, WeightVector, score)
    best_weights: WeightVector
    best_score: float
    top_k_weights: list
    trace: list = field(default_factory=list)  # evaluation order audit


def sample_simplex(rng: np.random.Generator) -> WeightVector:
    """Uniform draw on the 4-simplex: five standard-exponential variates
    normalized by their sum."""
    draws = rng.standard_exponential(5)
    return WeightVector.from_array(draws / draws.sum())


def _candidates(cfg: SearchConfig):
    """Candidate 0 is always the equal-weights vector; the rest are seeded
    uniform simplex samples (PCG64 stream from the configured seed)."""
    rng = np.random.default_rng(cfg.seed)
    out = [WeightVector.equal()]
    for _ in range(cfg.sample_count - 1):
        out.append(sample_simplex(rng))
    return out


_POOL_STATE = {}


def _pool_init(videos, objective):
    _POOL_STATE["videos"] = videos
    _POOL_STATE["objective"] = objective


def _pool_eval(weights: WeightVector) -> float:
    return _score_candidate(_POOL_STATE["videos"], weights, _POOL_STATE["objective"])


def _score_candidate(videos, weights: WeightVector, objective: str) -> float:
    scores = []
    for manifest, gt_all_frames in videos:
        res = evaluate(greedy_merge(manifest, weights).label_maps, gt_all_frames)
        scores.append(getattr(res, objective))
    return float(np.mean(scores))


def random_search(videos, cfg: SearchConfig, jobs: int = 1) -> SearchResult:
    """Evaluate cfg.sample_count weight vectors on the given corpus.

    ``videos`` is a list of (VideoManifest, full-video GT) pairs; the GT is a
    per-frame {object_id: Mask} list as accepted by evaluate(). Parallel and
    serial runs produce identical results: candidates are drawn up front from
    one seeded stream and scored independently.
    """
    if not videos:
        raise TrackmergeError("random_search needs at least one video")
    candidates = _candidates(cfg)
    if jobs > 1:
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_pool_init, initargs=(videos, cfg.objective)
        ) as pool:
            scores = list(pool.map(_pool_eval, candidates, chunksize=8))
    else:
        scores = [_score_candidate(videos, w, cfg.objective) for w in candidates]

    order = sorted(range(len(candidates)), key=lambda i: (-scores[i], i))
    ranked = [(i, candidates[i], scores[i]) for i in order]
    trace = [
        {"index": i, "weights": candidates[i].as_array().tolist(), "score": scores[i]}
        for i in range(len(candidates))
    ]
    return SearchResult(
        ranked=ranked,
        best_weights=ranked[0][1],
        best_score=ranked[0][2],
        top_k_weights=[w for _, w, _ in ranked[: cfg.top_k]],
        trace=trace,
    )


def result_to_dict(res: SearchResult) -> dict:
    return {
        "best": {"weights": res.best_weights.as_array().tolist(), "score": res.best_score},
        "ranked": [
            {"index": i, "weights": w.as_array().tolist(), "score": s}
            for i, w, s in res.ranked
        ],
        "top_k": [w.as_array().tolist() for w in res.top_k_weights],
        "trace": res.trace,
    }


def save_search_result(res: SearchResult, path):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(result_to_dict(res), f, sort_keys=True, indent=2)
        f.write("\n")


def load_top_k_weights(path) -> list:
    """Re-load the top-k weight vectors written by save_search_result."""
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    return [WeightVector.from_array(w) for w in data["top_k"]]
