"""Video manifest schema (frames, proposals, ground truth, flow references)
and proposal filtering: score threshold plus mask-IoU non-maximum suppression.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ManifestError, TrackmergeError
from .flow import FlowField, load_flo
from .mask import BBox, Mask, iou


@dataclass(frozen=True, eq=False)
class Proposal:
    """One candidate object in one frame. Identity equality (embeddings are
    arrays); filtering returns the original objects."""

    frame_index: int
    mask: Mask
    bbox: BBox
    objectness: float
    embedding: np.ndarray

    def __post_init__(self):
        if not (0.0 <= self.objectness <= 1.0):
            raise ManifestError(f"objectness {self.objectness} outside [0, 1]")
        emb = np.asarray(self.embedding, dtype=np.float64)
        if emb.ndim != 1 or not np.isfinite(emb).all():
            raise ManifestError("embedding must be a 1D finite vector")
        emb.setflags(write=False)
        object.__setattr__(self, "embedding", emb)


@dataclass(frozen=True, eq=False)
class GroundTruthObject:
    """First-frame annotation for one tracked object."""

    object_id: int
    first_frame_mask: Mask
    first_frame_bbox: BBox
    embedding: np.ndarray

    def __post_init__(self):
        if self.object_id <= 0:
            raise ManifestError(f"object_id must be positive, got {self.object_id}")
        emb = np.asarray(self.embedding, dtype=np.float64)
        if emb.ndim != 1 or not np.isfinite(emb).all():
            raise ManifestError("embedding must be a 1D finite vector")
        emb.setflags(write=False)
        object.__setattr__(self, "embedding", emb)


@dataclass
class VideoManifest:
    """All per-video inputs: proposals per frame, GT objects, flow references.

    ``flow_paths[t-1]`` names the backward t -> t-1 field for frame t.
    Flow fields may be preloaded (synthetic data) or loaded lazily from disk.
    """

    video_id: str
    width: int
    height: int
    frame_count: int
    embedding_dim: int
    proposals: list  # list (len frame_count) of list[Proposal]
    ground_truth: list  # list[GroundTruthObject]
    flow_paths: list  # list (len frame_count - 1) of str
    preloaded_flows: list | None = field(default=None, repr=False)
    base_dir: str = "."

    def __post_init__(self):
        if self.frame_count <= 0:
            raise ManifestError("frame_count must be positive")
        if self.embedding_dim <= 0:
            raise ManifestError("embedding_dim must be positive")
        if len(self.proposals) != self.frame_count:
            raise ManifestError(
                f"frames has {len(self.proposals)} entries, expected {self.frame_count}"
            )
        if len(self.flow_paths) != self.frame_count - 1:
            raise ManifestError(
                f"flows has {len(self.flow_paths)} entries, expected {self.frame_count - 1}"
            )
        if not self.ground_truth:
            raise ManifestError("ground_truth must contain at least one object")
        ids = [g.object_id for g in self.ground_truth]
        if len(set(ids)) != len(ids):
            raise ManifestError(f"duplicate object_ids in ground_truth: {ids}")
        for g in self.ground_truth:
            self._check_mask(g.first_frame_mask, f"ground_truth[{g.object_id}]")
            if len(g.embedding) != self.embedding_dim:
                raise ManifestError(
                    f"ground_truth[{g.object_id}].embedding has length "
                    f"{len(g.embedding)}, expected {self.embedding_dim}"
                )
        for t, frame in enumerate(self.proposals):
            for i, p in enumerate(frame):
                self._check_mask(p.mask, f"frames[{t}][{i}]")
                if len(p.embedding) != self.embedding_dim:
                    raise ManifestError(
                        f"frames[{t}][{i}].embedding has length "
                        f"{len(p.embedding)}, expected {self.embedding_dim}"
                    )

    def _check_mask(self, m: Mask, where: str):
        if m.width != self.width or m.height != self.height:
            raise ManifestError(
                f"{where}: mask is {m.width}x{m.height}, video is "
                f"{self.width}x{self.height}"
            )

    def flow(self, t: int) -> FlowField:
        """Backward flow for frame t (1 <= t < frame_count)."""
        if not (1 <= t < self.frame_count):
            raise ManifestError(f"no flow for frame {t}")
        if self.preloaded_flows is not None:
            return self.preloaded_flows[t - 1]
        f = load_flo(os.path.join(self.base_dir, self.flow_paths[t - 1]))
        if f.width != self.width or f.height != self.height:
            raise ManifestError(
                f"flow {self.flow_paths[t - 1]} is {f.width}x{f.height}, "
                f"video is {self.width}x{self.height}"
            )
        return f

    @property
    def object_ids(self):
        return [g.object_id for g in self.ground_truth]


def _require(obj, key, where):
    if key not in obj:
        raise ManifestError(f"{where}: missing key '{key}'")
    return obj[key]


def _mask_from_rle(rle, width, height, where) -> Mask:
    if not isinstance(rle, list):
        raise ManifestError(f"{where}.rle: expected an integer array")
    try:
        return Mask(width, height, rle)
    except TrackmergeError as e:
        raise ManifestError(f"{where}.rle: {e}") from e


def _proposal_from_json(obj, t, i, width, height) -> Proposal:
    where = f"frames[{t}][{i}]"
    mask = _mask_from_rle(_require(obj, "rle", where), width, height, where)
    tight = None if mask.is_empty else mask.bbox()
    if "bbox" in obj and obj["bbox"] is not None:
        x0, y0, x1, y1 = obj["bbox"]
        box = BBox(x0, y0, x1, y1)
        if box != tight:
            raise ManifestError(f"{where}.bbox: not the tight bbox of the mask")
    else:
        if tight is None:
            raise ManifestError(f"{where}: empty proposal mask has no bbox")
        box = tight
    return Proposal(
        frame_index=t,
        mask=mask,
        bbox=box,
        objectness=float(_require(obj, "objectness", where)),
        embedding=np.asarray(_require(obj, "embedding", where), dtype=np.float64),
    )


def manifest_to_json(m: VideoManifest) -> dict:
    """Serializable dict in the manifest schema (inverse of the loader)."""
    return {
        "video_id": m.video_id,
        "width": m.width,
        "height": m.height,
        "frame_count": m.frame_count,
        "embedding_dim": m.embedding_dim,
        "ground_truth": [
            {
                "object_id": g.object_id,
                "rle": list(g.first_frame_mask.runs),
                "embedding": g.embedding.tolist(),
            }
            for g in m.ground_truth
        ],
        "frames": [
            [
                {
                    "rle": list(p.mask.runs),
                    "bbox": [p.bbox.x0, p.bbox.y0, p.bbox.x1, p.bbox.y1],
                    "objectness": p.objectness,
                    "embedding": p.embedding.tolist(),
                }
                for p in frame
            ]
            for frame in m.proposals
        ],
        "flows": list(m.flow_paths),
    }


def save_manifest(m: VideoManifest, path):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest_to_json(m), f, sort_keys=True, separators=(",", ":"))
        f.write("\n")


def load_manifest(path, check_flow_files: bool = True) -> VideoManifest:
    """Load and validate a manifest JSON file.

    Raises ManifestError naming the offending field on any schema violation.
    """
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ManifestError(f"{path}: not valid JSON ({e})") from e
    base_dir = os.path.dirname(os.path.abspath(path))
    width = int(_require(data, "width", "manifest"))
    height = int(_require(data, "height", "manifest"))
    gts = []
    for k, obj in enumerate(_require(data, "ground_truth", "manifest")):
        where = f"ground_truth[{k}]"
        gts.append(
            GroundTruthObject(
                object_id=int(_require(obj, "object_id", where)),
                first_frame_mask=_mask_from_rle(
                    _require(obj, "rle", where), width, height, where
                ),
                first_frame_bbox=_mask_from_rle(
                    _require(obj, "rle", where), width, height, where
                ).bbox(),
                embedding=np.asarray(_require(obj, "embedding", where), np.float64),
            )
        )
    frames = [
        [_proposal_from_json(p, t, i, width, height) for i, p in enumerate(frame)]
        for t, frame in enumerate(_require(data, "frames", "manifest"))
    ]
    flow_paths = [str(p) for p in _require(data, "flows", "manifest")]
    if check_flow_files:
        for p in flow_paths:
            if not os.path.isfile(os.path.join(base_dir, p)):
                raise ManifestError(f"flows: missing flow file '{p}'")
    return VideoManifest(
        video_id=str(_require(data, "video_id", "manifest")),
        width=width,
        height=height,
        frame_count=int(_require(data, "frame_count", "manifest")),
        embedding_dim=int(_require(data, "embedding_dim", "manifest")),
        proposals=frames,
        ground_truth=gts,
        flow_paths=flow_paths,
        base_dir=base_dir,
    )


def filter_proposals(frame_proposals, score_min: float = 0.05, nms_iou: float = 0.66):
    """Score thresholding then greedy mask-IoU NMS.

    Drops proposals with objectness <= score_min (strictly-greater rule), then
    walks the rest in descending objectness (ties by original index) and
    suppresses any proposal whose mask IoU with an already-kept one is
    >= nms_iou. Output is in descending-score order.
    """
    if not (0.0 <= score_min <= 1.0 and 0.0 <= nms_iou <= 1.0):
        raise ManifestError("filter thresholds must lie in [0, 1]")
    candidates = [
        (i, p) for i, p in enumerate(frame_proposals) if p.objectness > score_min
    ]
    candidates.sort(key=lambda ip: (-ip[1].objectness, ip[0]))
    kept = []
    for _, p in candidates:
        if all(iou(p.mask, q.mask) < nms_iou for q in kept):
            kept.append(p)
    return kept


def filter_manifest(m: VideoManifest, score_min: float = 0.05, nms_iou: float = 0.66):
    """Apply filter_proposals to every frame, returning a new manifest."""
    return VideoManifest(
        video_id=m.video_id,
        width=m.width,
        height=m.height,
        frame_count=m.frame_count,
        embedding_dim=m.embedding_dim,
        proposals=[filter_proposals(f, score_min, nms_iou) for f in m.proposals],
        ground_truth=m.ground_truth,
        flow_paths=m.flow_paths,
        preloaded_flows=m.preloaded_flows,
        base_dir=m.base_dir,
    )
