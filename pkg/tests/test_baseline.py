"""Region-growing segmenter, post-processing, synthetic corpus, perturbations."""

import numpy as np
import pytest

from glandeval import (
    DetectionCounts,
    LabelMap,
    SegmenterConfig,
    SynthSpec,
    connected_components,
    detection_counts,
    dice,
    evaluate,
    maximal_overlap,
    overlap_table,
    perturb,
    postprocess,
    segment_region_growing,
    synth_glands,
)
from glandeval.baseline import otsu_threshold
from glandeval.errors import FormatError, PlacementError


# ---------------------------------------------------------------------------
# synthetic corpus


def test_synth_gland_count():
    _, truth = synth_glands(SynthSpec(glands=5, seed=42))
    assert truth.n_objects == 5


def test_synth_deterministic():
    spec = SynthSpec(glands=4, seed=9, noise=3.0)
    img1, truth1 = synth_glands(spec)
    img2, truth2 = synth_glands(spec)
    assert np.array_equal(img1, img2)
    assert truth1 == truth2


def test_synth_zero_glands():
    img, truth = synth_glands(SynthSpec(glands=0, seed=0))
    assert truth.n_objects == 0
    assert len(np.unique(img)) == 1  # pure stroma


def test_synth_infeasible_packing():
    with pytest.raises(PlacementError):
        synth_glands(SynthSpec(width=100, height=100, glands=30, seed=1))


def test_synth_glands_do_not_touch():
    _, truth = synth_glands(SynthSpec(glands=8, seed=3))
    # every truth object is its own connected component
    comps = connected_components(truth.labels > 0, 8)
    assert comps.n_objects == truth.n_objects


# ---------------------------------------------------------------------------
# otsu


def test_otsu_separates_nuclei_band():
    img, _ = synth_glands(SynthSpec(glands=5, seed=11))
    threshold = otsu_threshold(img)
    assert 20 < threshold < 150


def test_otsu_constant_image():
    assert otsu_threshold(np.full((10, 10), 42)) == 42


# ---------------------------------------------------------------------------
# postprocess


def test_postprocess_removes_small_objects():
    grid = np.zeros((40, 40), dtype=int)
    grid[0:10, 0:10] = 1  # 100 px, below cutoff 1000
    out = postprocess(LabelMap(grid), SegmenterConfig())
    assert out.n_objects == 0


def test_postprocess_area_999_vs_1000():
    grid = np.zeros((80, 80), dtype=int)
    grid[1:34, 1:31] = 1  # 33*30 = 990
    grid[1:4, 31:34] = 1  # +9 = 999
    grid[40:65, 0:40] = 2  # 25*40 = 1000
    m = LabelMap(grid)
    assert m.objects[1].area == 999
    assert m.objects[2].area == 1000
    out = postprocess(m, SegmenterConfig(fill_holes=False))
    assert sorted(out.objects) == [2]


def test_postprocess_fills_enclosed_hole():
    grid = np.zeros((12, 12), dtype=int)
    grid[2:9, 2:9] = 1
    grid[4:7, 4:7] = 0  # hole
    out = postprocess(LabelMap(grid), SegmenterConfig(min_object_area=0))
    assert out.objects[1].area == 49


def test_postprocess_keeps_multi_object_gap_open():
    # background pocket between two objects touches both: not a hole
    grid = np.zeros((10, 14), dtype=int)
    grid[2:8, 2:6] = 1
    grid[2:8, 8:12] = 2
    pocket = (slice(3, 7), slice(6, 8))
    grid_with_roof = grid.copy()
    grid_with_roof[2, 6:8] = 1
    grid_with_roof[7, 6:8] = 2
    out = postprocess(LabelMap(grid_with_roof), SegmenterConfig(min_object_area=0))
    assert (out.labels[pocket] == 0).all()


def test_postprocess_identity_when_clean():
    grid = np.zeros((50, 50), dtype=int)
    grid[5:45, 5:45] = 7
    m = LabelMap(grid)
    assert postprocess(m, SegmenterConfig()) == m


def test_postprocess_idempotent():
    rng = np.random.default_rng(31)
    grid = np.zeros((60, 60), dtype=int)
    for k in range(1, 6):
        r, c = rng.integers(0, 40, size=2)
        grid[r : r + rng.integers(3, 20), c : c + rng.integers(3, 20)] = k
    cfg = SegmenterConfig(min_object_area=150)
    once = postprocess(LabelMap(grid), cfg)
    twice = postprocess(once, cfg)
    assert once == twice


# ---------------------------------------------------------------------------
# segmenter


def test_segment_three_rings_high_dice():
    img, truth = synth_glands(SynthSpec(glands=3, seed=5))
    pred = segment_region_growing(img)
    assert pred.n_objects == 3
    table = overlap_table(truth, pred)
    corr = maximal_overlap(table)
    for i in truth.objects:
        j = corr.seg_partner[i]
        assert j is not None
        assert dice(truth.labels == i, pred.labels == j) >= 0.9


def test_segment_blank_image():
    blank = np.full((64, 64), 150, dtype=np.uint8)
    assert segment_region_growing(blank).n_objects == 0


def test_segment_deterministic():
    img, _ = synth_glands(SynthSpec(glands=4, seed=6, noise=4.0))
    assert segment_region_growing(img) == segment_region_growing(img)


def test_segment_rejects_color():
    with pytest.raises(FormatError):
        segment_region_growing(np.zeros((8, 8, 3), dtype=np.uint8))


def test_segment_output_sequential_and_connected():
    img, _ = synth_glands(SynthSpec(glands=5, seed=8))
    pred = segment_region_growing(img)
    assert sorted(pred.objects) == list(range(1, pred.n_objects + 1))
    for label in pred.objects:
        comp = connected_components(pred.labels == label, 8)
        assert comp.n_objects == 1


def test_pipeline_perfect_on_separated_glands():
    pairs = []
    for seed in range(4):
        img, truth = synth_glands(SynthSpec(glands=3 + seed, seed=100 + seed))
        pairs.append((truth, segment_region_growing(img)))
    report = evaluate(pairs)
    assert report.f1 == 1.0
    assert report.dice_obj >= 0.95


# ---------------------------------------------------------------------------
# perturb


def _counts(gt, seg):
    table = overlap_table(gt, seg)
    return detection_counts(table, maximal_overlap(table))


def test_perturb_drop_object_raises_fn():
    _, truth = synth_glands(SynthSpec(glands=3, seed=12, width=200, height=200))
    dropped = perturb(truth, "drop-object", magnitude=1, seed=0)
    assert dropped.n_objects == 2
    before = _counts(truth, truth)
    after = _counts(truth, dropped)
    assert after.fn == before.fn + 1
    assert after.tp == before.tp - 1


def test_perturb_shift_zero_identity():
    _, truth = synth_glands(SynthSpec(glands=2, seed=13, width=150, height=150))
    assert perturb(truth, "shift", magnitude=0, seed=5) == truth


def test_perturb_shift_moves_pixels():
    m = LabelMap([[1, 0, 0], [0, 0, 0], [0, 0, 2]])
    out = perturb(m, "shift", magnitude=1, seed=3)
    assert sum(r.area for r in out.objects.values()) <= 2


def test_perturb_dilate_grows_and_lowers_dice():
    _, truth = synth_glands(SynthSpec(glands=3, seed=14, width=220, height=220))
    grown = perturb(truth, "dilate", magnitude=2)
    for label in truth.objects:
        assert grown.objects[label].area > truth.objects[label].area
        assert dice(truth.labels == label, grown.labels == label) < 1.0
    report = evaluate([(truth, grown)])
    assert report.dice_obj < 1.0


def test_perturb_erode_can_kill_objects():
    m = LabelMap([[0, 0, 0], [0, 1, 0], [0, 0, 0]])
    assert perturb(m, "erode", magnitude=2).n_objects == 0


def test_perturb_merge_pair():
    _, truth = synth_glands(SynthSpec(glands=4, seed=15, width=260, height=260))
    merged = perturb(truth, "merge-pair", seed=2)
    assert merged.n_objects == truth.n_objects - 1


def test_perturb_split_adds_object():
    _, truth = synth_glands(SynthSpec(glands=3, seed=16, width=220, height=220))
    split = perturb(truth, "split", seed=4)
    assert split.n_objects == truth.n_objects + 1


def test_perturb_deterministic():
    _, truth = synth_glands(SynthSpec(glands=4, seed=17, width=260, height=260))
    for kind in ("dilate", "erode", "shift", "merge-pair", "split", "drop-object"):
        assert perturb(truth, kind, magnitude=1, seed=9) == perturb(
            truth, kind, magnitude=1, seed=9
        )


def test_perturb_rejects_unknown_kind():
    with pytest.raises(ValueError):
        perturb(LabelMap([[1]]), "sparkle")
