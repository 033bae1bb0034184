"""Batch command-line front end.

Subcommands: synth, filter, merge, oracle, eval, search, ensemble. Usage
problems exit with code 2; runtime/data failures exit with code 1 and a
machine-readable JSON error line on stderr. All commands are deterministic
given their flags and seed, including under --jobs parallelism.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .ensemble import majority_vote
from .errors import TrackmergeError
from .labelmap import read_pgm, write_pgm
from .manifest import filter_manifest, load_manifest, save_manifest
from .merging import greedy_merge, oracle_merge, save_trackset
from .metrics import evaluate, write_report
from .scoring import COMPONENTS, WeightVector, effective_weights
from .search import SearchConfig, load_top_k_weights, random_search, save_search_result
from .synth import (
    crossing_scenario,
    generate,
    random_scenario,
    save_scenario,
    single_object_scenario,
)

_COMPONENT_ALIASES = {
    "obj": "objectness",
    "objectness": "objectness",
    "reid": "reid",
    "maskprop": "maskprop",
    "inv_reid": "inv_reid",
    "invreid": "inv_reid",
    "inv_maskprop": "inv_maskprop",
    "invmaskprop": "inv_maskprop",
}


class UsageError(Exception):
    pass


def _default_jobs():
    return int(os.environ.get("TRACKMERGE_JOBS", "1"))


def parse_weights(text: str) -> WeightVector:
    """'equal' or five comma-separated reals; sums within 1% of 1 are
    normalized, anything further off is rejected as a typo."""
    if text == "equal":
        return WeightVector.equal()
    parts = text.split(",")
    if len(parts) != 5:
        raise UsageError(f"expected 5 comma-separated weights, got {len(parts)}")
    try:
        vals = np.array([float(p) for p in parts])
    except ValueError as e:
        raise UsageError(f"bad weight value: {e}") from e
    if (vals < 0).any():
        raise UsageError("weights must be non-negative")
    total = vals.sum()
    if abs(total - 1.0) > 0.01:
        raise UsageError(f"weights sum to {total}, expected 1 (within 1%)")
    return WeightVector.from_array(vals / total)


def parse_components(text: str):
    names = set()
    for raw in text.split(","):
        key = raw.strip().lower()
        if key not in _COMPONENT_ALIASES:
            raise UsageError(f"unknown component '{raw}'")
        names.add(_COMPONENT_ALIASES[key])
    if not names:
        raise UsageError("component list is empty")
    return tuple(c in names for c in COMPONENTS)


def load_gt_dir(path):
    """Read a directory of per-frame GT label-map PGMs into the per-frame
    {object_id: Mask} layout used by evaluation and oracle merging."""
    files = sorted(glob.glob(os.path.join(path, "*.pgm")))
    if not files:
        raise TrackmergeError(f"no .pgm files in {path}")
    maps = [read_pgm(f) for f in files]
    ids = sorted(set(np.unique(np.stack([m.labels for m in maps]))) - {0})
    if not ids:
        raise TrackmergeError(f"{path}: ground truth contains no objects")
    return [{int(j): lm.object_mask(int(j)) for j in ids} for lm in maps]


def load_pred_dir(path):
    files = sorted(glob.glob(os.path.join(path, "*.pgm")))
    if not files:
        raise TrackmergeError(f"no .pgm files in {path}")
    return [read_pgm(f) for f in files]


# ---------------------------------------------------------------------------
# subcommands


def cmd_synth(args):
    if args.preset == "single":
        spec = single_object_scenario(args.seed, frame_count=args.frames or 5)
    elif args.preset == "crossing":
        spec = crossing_scenario(args.seed)
    else:
        spec = random_scenario(args.seed, max_frames=args.frames or 6)
    save_scenario(generate(spec), args.out)


def cmd_filter(args):
    m = load_manifest(args.manifest)
    save_manifest(filter_manifest(m, args.score_min, args.nms_iou), args.out)


def _resolve_weights(args) -> WeightVector:
    if args.weights_file:
        top = load_top_k_weights(args.weights_file)
        if not (0 <= args.weights_index < len(top)):
            raise UsageError(
                f"--weights-index {args.weights_index} out of range (file has {len(top)})"
            )
        return top[args.weights_index]
    return parse_weights(args.weights)


def _merge_one(manifest_path, weights, active, out_dir):
    m = load_manifest(manifest_path)
    save_trackset(greedy_merge(m, weights, active), out_dir)


def cmd_merge(args):
    weights = _resolve_weights(args)
    active = parse_components(args.components) if args.components else (True,) * 5
    effective_weights(weights, active)  # reject empty/invalid combos up front
    if args.jobs > 1 and len(args.manifest) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            tasks = [
                pool.submit(_merge_one, p, weights, active, args.out)
                for p in args.manifest
            ]
            for t in tasks:
                t.result()
    else:
        for p in args.manifest:
            _merge_one(p, weights, active, args.out)


def cmd_oracle(args):
    m = load_manifest(args.manifest)
    gt = load_gt_dir(args.gt)
    save_trackset(oracle_merge(m, gt), args.out)


def cmd_eval(args):
    pred = load_pred_dir(args.pred)
    gt = load_gt_dir(args.gt)
    res = evaluate(pred, gt, tolerance=args.tolerance, exclude_last=args.exclude_last)
    write_report(res, args.out, args.csv)


def cmd_search(args):
    videos = []
    for d in args.data:
        m = load_manifest(os.path.join(d, "manifest.json"))
        m = filter_manifest(m, args.score_min, args.nms_iou)
        videos.append((m, load_gt_dir(os.path.join(d, "gt"))))
    cfg = SearchConfig(
        sample_count=args.samples,
        seed=args.seed,
        top_k=args.top_k,
        objective=args.objective,
    )
    save_search_result(random_search(videos, cfg, jobs=args.jobs), args.out)


def cmd_ensemble(args):
    video_ids = sorted(
        d for d in os.listdir(args.inputs[0])
        if os.path.isdir(os.path.join(args.inputs[0], d))
    )
    if not video_ids:
        raise TrackmergeError(f"no video subdirectories in {args.inputs[0]}")
    for vid in video_ids:
        results = []
        for inp in args.inputs:
            d = os.path.join(inp, vid)
            if not os.path.isdir(d):
                raise TrackmergeError(f"input {inp} is missing video '{vid}'")
            results.append(load_pred_dir(d))
        voted = majority_vote(results)
        out_dir = os.path.join(args.out, vid)
        os.makedirs(out_dir, exist_ok=True)
        for t, lm in enumerate(voted):
            write_pgm(lm, os.path.join(out_dir, f"{t:05d}.pgm"))


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(
        prog="trackmerge",
        description="Select and link per-frame mask proposals into multi-object video tracks.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="generate a synthetic scenario directory")
    sp.add_argument("--out", required=True)
    sp.add_argument("--preset", choices=["single", "crossing", "random"], default="single")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--frames", type=int, default=None)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("filter", help="score-threshold + NMS proposal filtering")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--score-min", type=float, default=0.05)
    sp.add_argument("--nms-iou", type=float, default=0.66)
    sp.set_defaults(func=cmd_filter)

    sp = sub.add_parser("merge", help="greedy track building; writes PGMs + selections.json")
    sp.add_argument("--manifest", required=True, nargs="+")
    sp.add_argument("--out", required=True)
    sp.add_argument("--weights", default="equal")
    sp.add_argument("--weights-file", default=None, help="search result JSON")
    sp.add_argument("--weights-index", type=int, default=0, help="row of the top-k list")
    sp.add_argument("--components", default=None, help="comma list, e.g. obj,reid,maskprop")
    sp.add_argument("--jobs", type=int, default=_default_jobs())
    sp.set_defaults(func=cmd_merge)

    sp = sub.add_parser("oracle", help="upper-bound merging against full-video GT")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--gt", required=True, help="directory of GT label-map PGMs")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("eval", help="J/F mean-recall-decay report")
    sp.add_argument("--pred", required=True, help="video directory of predicted PGMs")
    sp.add_argument("--gt", required=True, help="directory of GT label-map PGMs")
    sp.add_argument("--out", required=True, help="JSON report path")
    sp.add_argument("--csv", default=None)
    sp.add_argument("--tolerance", type=float, default=None)
    sp.add_argument("--exclude-last", action="store_true")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("search", help="random-search weight optimization")
    sp.add_argument("--data", required=True, nargs="+", help="scenario directories")
    sp.add_argument("--out", required=True)
    sp.add_argument("--samples", type=int, default=25000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--top-k", type=int, default=11)
    sp.add_argument("--objective", choices=["jf_mean", "j_mean", "f_mean"], default="jf_mean")
    sp.add_argument("--score-min", type=float, default=0.05)
    sp.add_argument("--nms-iou", type=float, default=0.66)
    sp.add_argument("--jobs", type=int, default=_default_jobs())
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("ensemble", help="pixel-wise majority vote over result trees")
    sp.add_argument("--inputs", required=True, nargs="+", help="merge output directories")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_ensemble)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as e:
        print(json.dumps({"error": "usage", "message": str(e)}), file=sys.stderr)
        return 2
    except (TrackmergeError, OSError) as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
