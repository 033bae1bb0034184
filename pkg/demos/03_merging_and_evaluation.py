"""Merging proposals into tracks and scoring the result.

Shows greedy merging with the five-component score, component ablations on
the crossing scenario, the ground-truth-aware oracle merger, and the J / F
evaluation metrics.
"""

from trackmerge import WeightVector, evaluate, generate, greedy_merge, oracle_merge
from trackmerge.synth import crossing_scenario

result = generate(crossing_scenario())
manifest, gt = result.manifest, result.gt_all_frames

# Each candidate proposal is scored as an affine combination of five cues:
# objectness, appearance similarity (reid), flow-warped mask overlap
# (maskprop), and the two inverse cues that penalize matching other tracks.
# Per track and frame the argmax candidate is selected; overlapping
# selections are resolved pixel-wise in favor of the higher combined score.
ts = greedy_merge(manifest)  # equal weights over all five components
res = evaluate(ts.label_maps, gt)
print("all five components, equal weights: J&F =", res.jf_mean)

# Ablations redistribute the weight of disabled components over the rest.
# The crossing scenario is built so only mask propagation survives it: the
# planted distractor wins on objectness and appearance is symmetric.
for label, active in [
    ("maskprop only      ", (False, False, True, False, False)),
    ("objectness only    ", (True, False, False, False, False)),
    ("four, no maskprop  ", (True, True, False, True, True)),
]:
    r = evaluate(greedy_merge(manifest, active=active).label_maps, gt)
    print(f"{label}: J&F = {r.jf_mean:.3f}")

# Custom weights are plain frozen records that must sum to one.
w = WeightVector(objectness=0.19, reid=0.18, maskprop=0.22, inv_reid=0.14,
                 inv_maskprop=0.27)
print("custom weights:", evaluate(greedy_merge(manifest, w).label_maps, gt).jf_mean)

# The oracle picks, per frame and object, the proposal with highest IoU
# against ground truth. It upper-bounds what any weight vector can reach.
oracle = evaluate(oracle_merge(manifest, gt).label_maps, gt)
print("oracle upper bound: J&F =", oracle.jf_mean)

# The evaluation result carries per-object region (J) and contour (F)
# statistics: mean, recall, and decay over the video.
for oid, obj in res.per_object.items():
    print(f"object {oid}: J mean {obj.j_mean:.3f}  F mean {obj.f_mean:.3f}  "
          f"J decay {obj.j_decay:.3f}")
