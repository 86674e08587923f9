"""End-to-end CLI behavior: subcommands, exit codes, error envelope."""

import json

import numpy as np
import pytest

from glandeval import LabelMap, SynthSpec, synth_glands
from glandeval.cli import main
from glandeval.formats import bundled_contest_scores, save_label_image


def _make_manifest(tmp_path, n=2, mangle=False):
    records = []
    for k in range(n):
        _, truth = synth_glands(SynthSpec(glands=2, seed=50 + k, width=160, height=160))
        truth_path = tmp_path / f"t{k}.png"
        pred_path = tmp_path / f"p{k}.png"
        save_label_image(truth, truth_path)
        save_label_image(truth, pred_path)
        records.append(
            {"id": f"img{k}", "truth": truth_path.name, "prediction": pred_path.name}
        )
    doc = {"part": "A", "images": records}
    if mangle:
        doc["images"][0]["truth"] = "missing.png"
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(doc))
    return path


def test_evaluate_subcommand(tmp_path, capsys):
    manifest = _make_manifest(tmp_path)
    out = tmp_path / "report.json"
    code = main(
        [
            "evaluate",
            "--manifest",
            str(manifest),
            "--out",
            str(out),
            "--timestamp",
            "fixed",
        ]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["pooled"]["f1"] == 1.0
    assert payload["timestamp"] == "fixed"
    assert payload["config"]["part"] == "A"


def test_evaluate_jobs_byte_identical(tmp_path):
    manifest = _make_manifest(tmp_path, n=3)
    out1 = tmp_path / "r1.json"
    out8 = tmp_path / "r8.json"
    base = ["evaluate", "--manifest", str(manifest), "--timestamp", "fixed"]
    assert main(base + ["--out", str(out1), "--jobs", "1"]) == 0
    assert main(base + ["--out", str(out8), "--jobs", "8"]) == 0
    assert out1.read_bytes() == out8.read_bytes()


def test_evaluate_validation_error_exit_2(tmp_path, capsys):
    manifest = _make_manifest(tmp_path, mangle=True)
    code = main(["evaluate", "--manifest", str(manifest), "--out", str(tmp_path / "r.json")])
    assert code == 2
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "ValidationError"


def test_evaluate_dimension_mismatch_exit_3(tmp_path, capsys):
    _, truth = synth_glands(SynthSpec(glands=1, seed=1, width=120, height=120))
    _, other = synth_glands(SynthSpec(glands=1, seed=1, width=130, height=130))
    save_label_image(truth, tmp_path / "t.png")
    save_label_image(other, tmp_path / "p.png")
    manifest = tmp_path / "m.json"
    manifest.write_text(
        json.dumps({"images": [{"id": "x", "truth": "t.png", "prediction": "p.png"}]})
    )
    code = main(["evaluate", "--manifest", str(manifest), "--out", str(tmp_path / "r.json")])
    assert code == 3
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "EvaluationError"
    assert "x" in err["message"]


def test_rank_subcommand(tmp_path):
    out = tmp_path / "board.json"
    code = main(["rank", "--scores", str(bundled_contest_scores()), "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert [e["rank_sum"] for e in payload["entries"]] == [
        17, 21, 22, 24, 26, 29, 30, 52, 53, 56,
    ]


def test_rank_missing_file_exit_2(tmp_path, capsys):
    code = main(["rank", "--scores", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o")])
    assert code == 2
    capsys.readouterr()


def test_segment_subcommand(tmp_path):
    from glandeval.formats import save_gray_image, load_label_image

    img, truth = synth_glands(SynthSpec(glands=3, seed=60))
    image_path = tmp_path / "img.png"
    save_gray_image(img, image_path)
    config_path = tmp_path / "seg.json"
    config_path.write_text(json.dumps({"min_object_area": 500}))
    out = tmp_path / "pred.png"
    code = main(
        ["segment", "--image", str(image_path), "--config", str(config_path), "--out", str(out)]
    )
    assert code == 0
    assert load_label_image(out).n_objects == truth.n_objects


def test_segment_unknown_setting_exit_2(tmp_path, capsys):
    img, _ = synth_glands(SynthSpec(glands=1, seed=61, width=120, height=120))
    from glandeval.formats import save_gray_image

    image_path = tmp_path / "img.png"
    save_gray_image(img, image_path)
    config_path = tmp_path / "seg.json"
    config_path.write_text(json.dumps({"bogus_knob": 1}))
    code = main(
        ["segment", "--image", str(image_path), "--config", str(config_path), "--out", str(tmp_path / "o.png")]
    )
    assert code == 2
    capsys.readouterr()


def test_synth_subcommand(tmp_path):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(
        json.dumps(
            {"images": 2, "glands": 3, "seed": 5, "width": 200, "height": 200}
        )
    )
    out_dir = tmp_path / "corpus"
    code = main(["synth", "--spec", str(spec_path), "--out-dir", str(out_dir)])
    assert code == 0
    listing = json.loads((out_dir / "dataset.json").read_text())
    assert len(listing["images"]) == 2
    assert (out_dir / "image_000.png").is_file()
    assert (out_dir / "truth_001.png").is_file()


@pytest.mark.parametrize("suite", ["hausdorff", "ari", "objdice"])
def test_oracle_subcommand(suite, capsys):
    code = main(["oracle", "--suite", suite, "--trials", "3", "--seed", "1"])
    assert code == 0
    out = capsys.readouterr().out
    assert "3/3 trials passed" in out
