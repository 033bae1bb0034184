"""Benchmark scoring: region similarity J, boundary similarity F, and the
per-sequence mean / recall / decay statistics, per object and aggregated."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import TrackmergeError
from .mask import Mask, boundary, dilate, intersection_area, iou


def default_boundary_tolerance(width, height) -> int:
    """ceil(0.008 * image diagonal), the usual benchmark convention."""
    return int(math.ceil(0.008 * math.hypot(width, height)))


def j_measure(pred: Mask, gt: Mask) -> float:
    """Region IoU with the evaluation convention empty-empty = 1."""
    return iou(pred, gt, empty_empty=1.0)


def f_measure(pred: Mask, gt: Mask, tolerance: float) -> float:
    """Boundary F: harmonic mean of boundary precision and recall, where a
    boundary pixel counts as matched if it lies within ``tolerance`` pixels
    of the other mask's boundary (dilated-boundary approximation)."""
    if tolerance < 0:
        raise TrackmergeError(f"tolerance must be >= 0, got {tolerance}")
    pb = boundary(pred)
    gb = boundary(gt)
    if pb.is_empty and gb.is_empty:
        return 1.0
    if pb.is_empty or gb.is_empty:
        return 0.0
    precision = _fraction_inside(pb, dilate(gb, tolerance))
    recall = _fraction_inside(gb, dilate(pb, tolerance))
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _fraction_inside(points: Mask, zone: Mask) -> float:
    return intersection_area(points, zone) / points.area


def sequence_stats(per_frame_scores):
    """(mean, recall, decay) over an ordered per-frame score list.

    recall counts frames scoring strictly above 0.5; decay is the mean of the
    first quartile bin minus the mean of the fourth, with the sequence split
    into 4 contiguous bins as equal as possible (remainders to earlier bins).
    """
    scores = np.asarray(per_frame_scores, dtype=np.float64)
    if scores.size == 0:
        raise TrackmergeError("sequence_stats needs at least one score")
    mean = float(scores.mean())
    recall = float((scores > 0.5).mean())
    bins = np.array_split(scores, 4)
    decay = float(bins[0].mean() - bins[3].mean()) if bins[3].size else 0.0
    return mean, recall, decay


@dataclass
class ObjectResult:
    j_mean: float
    j_recall: float
    j_decay: float
    f_mean: float
    f_recall: float
    f_decay: float


@dataclass
class EvalResult:
    """Per-object and aggregate benchmark scores for one video."""

    per_object: dict  # object_id -> ObjectResult
    j_mean: float
    j_recall: float
    j_decay: float
    f_mean: float
    f_recall: float
    f_decay: float
    jf_mean: float


def evaluate(pred_label_maps, gt_all_frames, tolerance=None, exclude_last=False) -> EvalResult:
    """Score predicted label maps against per-frame per-object GT masks.

    Frame 0 is excluded (it is the given annotation); the last frame is
    excluded too when ``exclude_last`` is set. ``gt_all_frames`` is a list of
    {object_id: Mask}; every nonzero label in the predictions must be a GT
    object id.
    """
    if len(pred_label_maps) != len(gt_all_frames):
        raise TrackmergeError(
            f"prediction has {len(pred_label_maps)} frames, GT has {len(gt_all_frames)}"
        )
    if len(pred_label_maps) < 2:
        raise TrackmergeError("need at least 2 frames to evaluate")
    ids = sorted(gt_all_frames[0])
    for t, lm in enumerate(pred_label_maps):
        unknown = set(np.unique(lm.labels)) - {0} - set(ids)
        if unknown:
            raise TrackmergeError(f"frame {t}: unknown labels {sorted(unknown)}")
    if tolerance is None:
        tolerance = default_boundary_tolerance(
            pred_label_maps[0].width, pred_label_maps[0].height
        )

    stop = len(pred_label_maps) - 1 if exclude_last else len(pred_label_maps)
    frames = range(1, stop)
    if not frames:
        raise TrackmergeError("no frames left to evaluate")

    per_object = {}
    for j in ids:
        js, fs = [], []
        for t in frames:
            pred = pred_label_maps[t].object_mask(j)
            gt = gt_all_frames[t][j]
            js.append(j_measure(pred, gt))
            fs.append(f_measure(pred, gt, tolerance))
        jm, jr, jd = sequence_stats(js)
        fm, fr, fd = sequence_stats(fs)
        per_object[j] = ObjectResult(jm, jr, jd, fm, fr, fd)

    def agg(attr):
        return float(np.mean([getattr(r, attr) for r in per_object.values()]))

    j_mean, f_mean = agg("j_mean"), agg("f_mean")
    return EvalResult(
        per_object=per_object,
        j_mean=j_mean,
        j_recall=agg("j_recall"),
        j_decay=agg("j_decay"),
        f_mean=f_mean,
        f_recall=agg("f_recall"),
        f_decay=agg("f_decay"),
        jf_mean=(j_mean + f_mean) / 2,
    )


def result_to_dict(res: EvalResult) -> dict:
    return {
        "per_object": {
            str(j): {
                "J": {"mean": r.j_mean, "recall": r.j_recall, "decay": r.j_decay},
                "F": {"mean": r.f_mean, "recall": r.f_recall, "decay": r.f_decay},
            }
            for j, r in res.per_object.items()
        },
        "J": {"mean": res.j_mean, "recall": res.j_recall, "decay": res.j_decay},
        "F": {"mean": res.f_mean, "recall": res.f_recall, "decay": res.f_decay},
        "J&F": {"mean": res.jf_mean},
    }


def write_report(res: EvalResult, json_path, csv_path=None):
    with open(json_path, "w", encoding="utf-8") as f:
        json.dump(result_to_dict(res), f, sort_keys=True, indent=2)
        f.write("\n")
    if csv_path:
        with open(csv_path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["object", "metric", "mean", "recall", "decay"])
            for j, r in sorted(res.per_object.items()):
                writer.writerow([j, "J", r.j_mean, r.j_recall, r.j_decay])
                writer.writerow([j, "F", r.f_mean, r.f_recall, r.f_decay])
            writer.writerow(["all", "J", res.j_mean, res.j_recall, res.j_decay])
            writer.writerow(["all", "F", res.f_mean, res.f_recall, res.f_decay])
            writer.writerow(["all", "J&F", res.jf_mean, "", ""])
