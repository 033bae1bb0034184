"""Greedy per-frame proposal selection (one track per ground-truth object),
pixel-level overlap resolution, and the oracle-merging upper bound."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import TrackmergeError
from .flow import warp_mask
from .labelmap import LabelMap, write_pgm
from .manifest import VideoManifest
from .mask import Mask, iou
from .scoring import (
    COMPONENTS,
    WeightVector,
    combined_score,
    compute_video_max_distances,
    effective_weights,
    inverse_scores,
    reid_score,
)

ALL_ACTIVE = (True, True, True, True, True)


@dataclass
class TrackSet:
    """Per-object selections and the final non-overlapping label maps.

    ``selections[object_id][t]`` is the chosen proposal index for frame t
    (None for frame 0, which is the given GT, and for zero-proposal frames).
    ``masks[object_id][t]`` is the full selected mask before overlap
    resolution; ``label_maps[t]`` is the resolved per-pixel assignment.
    """

    video_id: str
    object_ids: list
    selections: dict
    masks: dict
    label_maps: list
    report: list = field(default_factory=list)


def _resolve_overlaps(width, height, entries) -> LabelMap:
    """entries: list of (object_id, mask, priority_score). Overlapping pixels
    go to the highest score, ties to the lowest object_id."""
    order = sorted(entries, key=lambda e: (-e[2], e[0]))
    labels = np.zeros((height, width), dtype=np.uint8)
    for object_id, m, _ in reversed(order):
        labels[m.dense()] = object_id
    return LabelMap(width, height, labels)


def greedy_merge(
    manifest: VideoManifest,
    weights: WeightVector = None,
    active=ALL_ACTIVE,
) -> TrackSet:
    """Build one track per GT object by greedy argmax of the combined score.

    ``active`` switches sub-score components on/off for ablation runs;
    inactive components' weights are redistributed equally over active ones.
    """
    weights = weights if weights is not None else WeightVector.equal()
    w = effective_weights(weights, active)
    max_dist = compute_video_max_distances(manifest)
    gt = manifest.ground_truth
    ids = [g.object_id for g in gt]
    empty = Mask.empty(manifest.width, manifest.height)

    selections = {j: [None] for j in ids}
    masks = {j: [g.first_frame_mask] for j, g in zip(ids, gt)}
    report = [
        {
            "frame": 0,
            "objects": {
                str(j): {"proposal": None, "sub_scores": None, "combined": None}
                for j in ids
            },
        }
    ]
    label_maps = [
        _resolve_overlaps(
            manifest.width,
            manifest.height,
            [(j, g.first_frame_mask, 0.0) for j, g in zip(ids, gt)],
        )
    ]

    for t in range(1, manifest.frame_count):
        proposals = manifest.proposals[t]
        frame_report = {"frame": t, "objects": {}}
        if not proposals:
            for j in ids:
                selections[j].append(None)
                masks[j].append(empty)
                frame_report["objects"][str(j)] = {
                    "proposal": None,
                    "sub_scores": None,
                    "combined": None,
                }
            label_maps.append(LabelMap.background(manifest.width, manifest.height))
            report.append(frame_report)
            continue

        flow = manifest.flow(t)
        warped = {j: warp_mask(masks[j][t - 1], flow) for j in ids}

        n = len(proposals)
        reid = np.empty((n, len(ids)))
        prop = np.empty((n, len(ids)))
        for i, p in enumerate(proposals):
            for jj, g in enumerate(gt):
                reid[i, jj] = reid_score(p.embedding, g.embedding, max_dist[g.object_id])
                prop[i, jj] = iou(p.mask, warped[g.object_id], empty_empty=0.0)

        sub = np.empty((n, len(ids), 5))
        comb = np.empty((n, len(ids)))
        for i, p in enumerate(proposals):
            for jj in range(len(ids)):
                inv_r, inv_m = inverse_scores(reid[i], prop[i], jj)
                sub[i, jj] = (p.objectness, reid[i, jj], prop[i, jj], inv_r, inv_m)
                comb[i, jj] = combined_score(sub[i, jj], w)

        frame_entries = []
        for jj, j in enumerate(ids):
            k = int(np.argmax(comb[:, jj]))  # first max wins: lowest index on ties
            selections[j].append(k)
            masks[j].append(proposals[k].mask)
            frame_entries.append((j, proposals[k].mask, float(comb[k, jj])))
            frame_report["objects"][str(j)] = {
                "proposal": k,
                "sub_scores": dict(zip(COMPONENTS, (float(x) for x in sub[k, jj]))),
                "combined": float(comb[k, jj]),
            }
        label_maps.append(_resolve_overlaps(manifest.width, manifest.height, frame_entries))
        report.append(frame_report)

    return TrackSet(manifest.video_id, ids, selections, masks, label_maps, report)


def oracle_merge(manifest: VideoManifest, gt_all_frames) -> TrackSet:
    """Evaluation-only upper bound: per frame and object, pick the proposal
    with the highest IoU against that object's full-video GT mask.

    ``gt_all_frames`` is a list (length frame_count) of {object_id: Mask}.
    """
    if len(gt_all_frames) != manifest.frame_count:
        raise TrackmergeError(
            f"full GT has {len(gt_all_frames)} frames, expected {manifest.frame_count}"
        )
    ids = manifest.object_ids
    for t, frame_gt in enumerate(gt_all_frames):
        if set(frame_gt) != set(ids):
            raise TrackmergeError(f"full GT frame {t} object set does not match manifest")
    empty = Mask.empty(manifest.width, manifest.height)

    selections = {j: [None] for j in ids}
    masks = {j: [g.first_frame_mask] for j, g in zip(ids, manifest.ground_truth)}
    report = [{"frame": 0, "objects": {str(j): {"proposal": None, "iou": None} for j in ids}}]
    label_maps = [
        _resolve_overlaps(
            manifest.width,
            manifest.height,
            [(j, g.first_frame_mask, 0.0) for j, g in zip(ids, manifest.ground_truth)],
        )
    ]

    for t in range(1, manifest.frame_count):
        proposals = manifest.proposals[t]
        frame_report = {"frame": t, "objects": {}}
        frame_entries = []
        for j in ids:
            if not proposals:
                selections[j].append(None)
                masks[j].append(empty)
                frame_report["objects"][str(j)] = {"proposal": None, "iou": None}
                continue
            scores = [iou(p.mask, gt_all_frames[t][j], empty_empty=0.0) for p in proposals]
            k = int(np.argmax(scores))
            selections[j].append(k)
            masks[j].append(proposals[k].mask)
            frame_entries.append((j, proposals[k].mask, float(scores[k])))
            frame_report["objects"][str(j)] = {"proposal": k, "iou": float(scores[k])}
        label_maps.append(_resolve_overlaps(manifest.width, manifest.height, frame_entries))
        report.append(frame_report)

    return TrackSet(manifest.video_id, ids, selections, masks, label_maps, report)


def save_trackset(ts: TrackSet, out_dir):
    """Write `<out_dir>/<video_id>/<frame, 5 digits>.pgm` label maps plus a
    selections.json report."""
    video_dir = os.path.join(out_dir, ts.video_id)
    os.makedirs(video_dir, exist_ok=True)
    for t, lm in enumerate(ts.label_maps):
        write_pgm(lm, os.path.join(video_dir, f"{t:05d}.pgm"))
    with open(os.path.join(video_dir, "selections.json"), "w", encoding="utf-8") as f:
        json.dump(
            {"video_id": ts.video_id, "object_ids": ts.object_ids, "frames": ts.report},
            f,
            sort_keys=True,
            indent=2,
        )
        f.write("\n")
