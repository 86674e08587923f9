"""Acceptance suite: one test per release criterion, each printing PASS/FAIL.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
lines. Budgets are wall-clock upper bounds; every numeric tolerance is fixed
here and nowhere else.
"""

import json
import time

import numpy as np
import pytest

from glandeval import (
    EvalConfig,
    LabelMap,
    SynthSpec,
    evaluate,
    perturb,
    rank_column,
    rank_sum,
    segment_region_growing,
    synth_glands,
)
from glandeval import oracles
from glandeval.cli import main
from glandeval.formats import bundled_contest_scores, load_scores, save_label_image

from conftest import random_blob, random_label_pair, tie_free_pair

EXPECTED_RANK_CELLS = {
    "CUMedVision2": [1, 3, 1, 5, 1, 6],
    "ExB1": [4, 4, 4, 2, 6, 1],
    "ExB3": [2, 2, 2, 6, 5, 5],
    "Freiburg2": [5, 5, 5, 3, 3, 3],
    "CUMedVision1": [6, 1, 7, 1, 7, 4],
    "ExB2": [3, 6, 3, 7, 2, 8],
    "Freiburg1": [7, 7, 6, 4, 4, 2],
    "CVML": [9, 8, 10, 8, 10, 7],
    "LIB": [8, 10, 8, 9, 9, 9],
    "vision4GlaS": [10, 9, 9, 10, 8, 10],
}
EXPECTED_RANK_SUMS = [17, 21, 22, 24, 26, 29, 30, 52, 53, 56]
EXPECTED_ORDER = list(EXPECTED_RANK_CELLS)


def _report(criterion, ok, extra=""):
    line = f"[acceptance {criterion}] {'PASS' if ok else 'FAIL'}"
    if extra:
        line += f" ({extra})"
    print(line)
    assert ok


def test_criterion_1_contest_ranking_replay():
    start = time.perf_counter()
    table = load_scores(bundled_contest_scores())
    board = rank_sum(table)
    cells_ok = all(
        list(board.per_column_ranks[k]) == EXPECTED_RANK_CELLS[name]
        for k, name in enumerate(board.entries)
    )
    sums_ok = list(board.rank_sums) == EXPECTED_RANK_SUMS
    order_ok = list(board.final_order) == EXPECTED_ORDER
    elapsed = time.perf_counter() - start
    _report(
        1,
        cells_ok and sums_ok and order_ok and elapsed < 1.0,
        f"60 cells, sums, order; {elapsed:.3f}s",
    )


def test_criterion_2_tie_example():
    _report(2, rank_column([0.8, 0.7, 0.7, 0.6], "higher-better") == [1, 2, 2, 4])


def test_criterion_3_identity_suite():
    start = time.perf_counter()
    pairs = []
    for seed in range(50):
        _, truth = synth_glands(
            SynthSpec(
                glands=2 + seed % 4,
                seed=seed,
                width=160,
                height=160,
                radius=(10, 16),
                ring_thickness=(3, 5),
            )
        )
        pairs.append((truth, truth))
    report = evaluate(pairs)
    ok = (
        report.f1 == 1.0
        and report.dice_obj == 1.0
        and report.ari == 1.0
        and report.hausdorff_obj == 0.0
        and all(
            m.f1 == 1.0
            and m.dice_obj == 1.0
            and m.ari == 1.0
            and m.hausdorff_obj == 0.0
            for m in report.per_image
        )
    )
    elapsed = time.perf_counter() - start
    _report(3, ok and elapsed < 5.0, f"50 maps; {elapsed:.2f}s")


def test_criterion_4_hausdorff_oracle():
    from glandeval import hausdorff

    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        a = random_blob(rng, 64)
        b = random_blob(rng, 64)
        for mode in ("boundary", "full"):
            fast = hausdorff(a, b, mode)
            brute = oracles.allpairs_hausdorff(a, b, mode)
            worst = max(worst, abs(fast - brute))
    elapsed = time.perf_counter() - start
    _report(
        4,
        worst <= 1e-9 and elapsed < 30.0,
        f"200 pairs, both modes, worst |delta|={worst:.2e}; {elapsed:.1f}s",
    )


def test_criterion_5_ari_oracle():
    from glandeval import adjusted_rand, overlap_table

    start = time.perf_counter()
    rng = np.random.default_rng(2025)
    worst = 0.0
    for _ in range(100):
        g, s = random_label_pair(rng, 32)
        table = overlap_table(LabelMap(g), LabelMap(s))
        for policy in ("include", "exclude"):
            fast = adjusted_rand(table, policy)
            brute = oracles.paircount_ari(g, s, policy)
            worst = max(worst, abs(fast - brute))
    elapsed = time.perf_counter() - start
    _report(
        5,
        worst <= 1e-9 and elapsed < 60.0,
        f"100 pairs, both policies, worst |delta|={worst:.2e}; {elapsed:.1f}s",
    )


def test_criterion_6_object_score_expansion_oracle():
    from glandeval import pooled_object_dice, pooled_object_hausdorff

    rng = np.random.default_rng(2026)
    worst_dice = 0.0
    worst_haus = 0.0
    total_pairs = 0
    while total_pairs < 50:
        raw = [random_label_pair(rng, 24) for _ in range(2)]
        total_pairs += len(raw)
        pairs = [(LabelMap(g), LabelMap(s)) for g, s in raw]
        worst_dice = max(
            worst_dice,
            abs(pooled_object_dice(pairs) - oracles.expanded_object_dice(raw)),
        )
        worst_haus = max(
            worst_haus,
            abs(
                pooled_object_hausdorff(pairs)
                - oracles.expanded_object_hausdorff(raw)
            ),
        )
    _report(
        6,
        worst_dice <= 1e-9 and worst_haus <= 1e-9,
        f"{total_pairs} pairs pooled in twos; dice delta={worst_dice:.2e}, "
        f"hausdorff delta={worst_haus:.2e}",
    )


def _summary(report):
    return (
        report.f1,
        report.precision,
        report.recall,
        report.dice_pixel,
        report.dice_obj,
        report.hausdorff_obj,
        report.ari,
        report.counts,
    )


def _permute_labels(labels, rng):
    present = sorted(int(v) for v in np.unique(labels) if v > 0)
    if not present:
        return labels
    shuffled = list(present)
    rng.shuffle(shuffled)
    lut = np.zeros(max(present) + 1, dtype=labels.dtype)
    for old, new in zip(present, shuffled):
        lut[old] = new
    return np.where(labels > 0, lut[labels], 0)


def test_criterion_7_metamorphic_suite():
    rng = np.random.default_rng(2027)
    invariant = True
    for _ in range(100):
        g, s = tie_free_pair(rng, 20)
        base = _summary(evaluate([(LabelMap(g), LabelMap(s))]))
        variants = [
            (LabelMap(_permute_labels(g, rng)), LabelMap(_permute_labels(s, rng))),
            (LabelMap(np.flipud(g).copy()), LabelMap(np.flipud(s).copy())),
            (LabelMap(np.fliplr(g).copy()), LabelMap(np.fliplr(s).copy())),
        ]
        for pair in variants:
            if _summary(evaluate([pair])) != base:
                invariant = False

    drops_ok = True
    for seed in range(5):
        _, truth = synth_glands(
            SynthSpec(
                glands=4 + seed % 3,
                seed=900 + seed,
                width=220,
                height=220,
                radius=(10, 16),
                ring_thickness=(3, 5),
            )
        )
        baseline_counts = evaluate([(truth, truth)]).counts
        for k in (1, 2):
            dropped = perturb(truth, "drop-object", magnitude=k, seed=seed)
            counts = evaluate([(truth, dropped)]).counts
            if counts.fn != baseline_counts.fn + k or counts.tp != baseline_counts.tp - k:
                drops_ok = False
    _report(
        7,
        invariant and drops_ok,
        "100 pairs exact under permutation/flips; drop-object FN ledger exact",
    )


def test_criterion_8_baseline_end_to_end():
    start = time.perf_counter()
    pairs = []
    for k in range(20):
        spec = SynthSpec(glands=3 + k % 6, seed=3000 + k, noise=0.0)
        image, truth = synth_glands(spec)
        pairs.append((truth, segment_region_growing(image)))
    report = evaluate(pairs)
    elapsed = time.perf_counter() - start
    _report(
        8,
        report.f1 == 1.0 and report.dice_obj >= 0.95 and elapsed < 60.0,
        f"F1={report.f1}, Dice_obj={report.dice_obj:.4f}; {elapsed:.1f}s",
    )


def test_criterion_9_cli_determinism(tmp_path):
    records = []
    for k in range(4):
        _, truth = synth_glands(SynthSpec(glands=2 + k, seed=4000 + k, width=200, height=200))
        pred = perturb(truth, "dilate", magnitude=1)
        truth_path = tmp_path / f"t{k}.png"
        pred_path = tmp_path / f"p{k}.png"
        save_label_image(truth, truth_path)
        save_label_image(pred, pred_path)
        records.append(
            {"id": f"img{k}", "truth": truth_path.name, "prediction": pred_path.name}
        )
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({"images": records}))
    out1 = tmp_path / "jobs1.json"
    out8 = tmp_path / "jobs8.json"
    base = ["evaluate", "--manifest", str(manifest)]
    assert main(base + ["--out", str(out1), "--jobs", "1"]) == 0
    assert main(base + ["--out", str(out8), "--jobs", "8"]) == 0
    lines1 = out1.read_text().splitlines()
    lines8 = out8.read_text().splitlines()
    differing = [(a, b) for a, b in zip(lines1, lines8) if a != b]
    ok = len(lines1) == len(lines8) and (
        not differing or (len(differing) == 1 and "timestamp" in differing[0][0])
    )
    _report(9, ok, "reports byte-identical modulo timestamp")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-s", "-v"]))
