import json

import pytest

from headcount import load_frame
from headcount.cli import main

SCENE = {
    "width": 160,
    "height": 120,
    "frames": 90,
    "background_intensity": 50,
    "noise_amplitude": 4,
    "seed": 21,
    "lines": [40, 80],
    "actors": [
        {"radius": 8, "start": [40.0, 12.0], "velocity": [0.0, 4.0],
         "spawn_frame": 20, "despawn_frame": 46, "intensity": 220},
        {"radius": 8, "start": [120.0, 108.0], "velocity": [0.0, -4.0],
         "spawn_frame": 30, "despawn_frame": 56, "intensity": 220},
    ],
}

COUNT_FLAGS = ["--lines", "40,80", "--warmup", "15"]


def write_scene(tmp_path, scene=None):
    spec_path = tmp_path / "scene.json"
    spec_path.write_text(json.dumps(scene or SCENE))
    return spec_path


def synth(tmp_path, out_name="frames", scene=None, extra=()):
    spec_path = write_scene(tmp_path, scene)
    out_dir = tmp_path / out_name
    code = main(["synth", "--spec", str(spec_path), "--out", str(out_dir), *extra])
    assert code == 0
    return out_dir


def run_count(capsys, *args):
    code = main(["count", *args])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_synth_writes_frames_and_truth(tmp_path, capsys):
    out_dir = synth(tmp_path)
    capsys.readouterr()
    frames = sorted(out_dir.glob("*.pgm"))
    assert len(frames) == 90
    assert frames[0].name == "000000.pgm"
    truth = json.loads((out_dir / "truth.json").read_text())
    assert truth == {"true_in": 1, "true_out": 1, "true_total": 2}


def test_synth_is_deterministic(tmp_path, capsys):
    first = synth(tmp_path, "a")
    second = synth(tmp_path, "b")
    capsys.readouterr()
    for pa, pb in zip(sorted(first.iterdir()), sorted(second.iterdir())):
        assert pa.name == pb.name
        assert pa.read_bytes() == pb.read_bytes()


def test_synth_zero_frames_is_config_error(tmp_path, capsys):
    scene = dict(SCENE, frames=0)
    spec_path = write_scene(tmp_path, scene)
    code = main(["synth", "--spec", str(spec_path), "--out", str(tmp_path / "x")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_synth_requires_lines(tmp_path, capsys):
    scene = {k: v for k, v in SCENE.items() if k != "lines"}
    spec_path = write_scene(tmp_path, scene)
    code = main(["synth", "--spec", str(spec_path), "--out", str(tmp_path / "x")])
    assert code == 2
    capsys.readouterr()


def test_synth_eight_by_eight_truth(tmp_path, capsys):
    actors = []
    for wave in range(4):
        for lane in range(4):
            down = (wave + lane) % 2 == 0
            actors.append({
                "radius": 6,
                "start": [20.0 + 40.0 * lane, 10.0 if down else 110.0],
                "velocity": [0.0, 6.0 if down else -6.0],
                "spawn_frame": 10 + 30 * wave,
                "despawn_frame": 10 + 30 * wave + 18,
                "intensity": 220,
            })
    scene = {"width": 180, "height": 120, "frames": 160,
             "background_intensity": 50, "noise_amplitude": 0, "seed": 1,
             "lines": [40, 80], "actors": actors}
    out_dir = synth(tmp_path, scene=scene)
    capsys.readouterr()
    truth = json.loads((out_dir / "truth.json").read_text())
    assert truth == {"true_in": 8, "true_out": 8, "true_total": 16}
    assert len(list(out_dir.glob("*.pgm"))) == 160


def test_count_reports_scene_counts(tmp_path, capsys):
    out_dir = synth(tmp_path)
    capsys.readouterr()
    code, out, err = run_count(capsys, "--input", str(out_dir),
                               "--truth", str(out_dir / "truth.json"), *COUNT_FLAGS)
    assert code == 0
    doc = json.loads(out)
    assert (doc["in"], doc["out"], doc["total"]) == (1, 1, 2)
    assert doc["in_accuracy"] == doc["out_accuracy"] == doc["tc_accuracy"] == 100.0
    assert doc["true_total"] == 2
    assert [e["direction"] for e in doc["events"]] == ["IN", "OUT"]


def test_count_without_truth_omits_accuracies(tmp_path, capsys):
    out_dir = synth(tmp_path)
    capsys.readouterr()
    code, out, _ = run_count(capsys, "--input", str(out_dir), *COUNT_FLAGS)
    assert code == 0
    doc = json.loads(out)
    assert "in_accuracy" not in doc
    assert (doc["in"], doc["out"]) == (1, 1)


def test_count_is_byte_deterministic(tmp_path, capsys):
    out_dir = synth(tmp_path)
    capsys.readouterr()
    args = ("--input", str(out_dir), "--truth", str(out_dir / "truth.json"),
            *COUNT_FLAGS)
    _, first, _ = run_count(capsys, *args)
    _, second, _ = run_count(capsys, *args)
    assert first == second


def test_count_empty_directory_is_io_error(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    code, _, err = run_count(capsys, "--input", str(empty), *COUNT_FLAGS)
    assert code == 1
    assert "pgm" in err or "empty" in err


def test_count_missing_input_is_io_error(tmp_path, capsys):
    code, _, err = run_count(capsys, "--input", str(tmp_path / "nope"), *COUNT_FLAGS)
    assert code == 1


def test_count_bad_line_order_is_config_error(tmp_path, capsys):
    out_dir = synth(tmp_path)
    capsys.readouterr()
    code, _, err = run_count(capsys, "--input", str(out_dir), "--lines", "80,40")
    assert code == 2
    assert "line" in err


def test_count_requires_lines(tmp_path, capsys):
    out_dir = synth(tmp_path)
    capsys.readouterr()
    code, _, err = run_count(capsys, "--input", str(out_dir))
    assert code == 2
    assert "lines" in err


def test_count_raw_input(tmp_path, capsys):
    out_dir = synth(tmp_path)
    capsys.readouterr()
    raw = tmp_path / "frames.raw"
    with open(raw, "wb") as fh:
        for p in sorted(out_dir.glob("*.pgm")):
            fh.write(load_frame(p).pixels.tobytes())
    code, out, _ = run_count(capsys, "--input", str(raw), "--raw", "160x120",
                             *COUNT_FLAGS)
    assert code == 0
    doc = json.loads(out)
    assert (doc["in"], doc["out"], doc["total"]) == (1, 1, 2)


def test_count_annotate_writes_overlays(tmp_path, capsys):
    out_dir = synth(tmp_path)
    capsys.readouterr()
    ann_dir = tmp_path / "annotated"
    code, _, _ = run_count(capsys, "--input", str(out_dir),
                           "--annotate", str(ann_dir), *COUNT_FLAGS)
    assert code == 0
    annotated = sorted(ann_dir.glob("*.pgm"))
    assert len(annotated) == 90
    img = load_frame(annotated[40]).pixels
    assert (img[40] == 255).all()
    assert (img[80] == 255).all()


def test_count_config_file_and_flag_override(tmp_path, capsys):
    out_dir = synth(tmp_path)
    capsys.readouterr()
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"lines": [40, 80], "warmup": 15, "alpha": 0.05}))
    code, out, _ = run_count(capsys, "--input", str(out_dir),
                             "--config", str(conf), "--threshold", "30")
    assert code == 0
    params = json.loads(out)["params"]
    assert params["alpha"] == 0.05       # from the config file
    assert params["threshold"] == 30.0   # flag overrides the default
    assert params["lines"] == [40, 80]


def test_count_unknown_config_key(tmp_path, capsys):
    out_dir = synth(tmp_path)
    capsys.readouterr()
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"lines": [40, 80], "sigma": 3}))
    code, _, err = run_count(capsys, "--input", str(out_dir), "--config", str(conf))
    assert code == 2
    assert "sigma" in err


def test_count_stdout_is_single_json_document(tmp_path, capsys):
    out_dir = synth(tmp_path)
    capsys.readouterr()
    code, out, _ = run_count(capsys, "--input", str(out_dir), *COUNT_FLAGS)
    assert code == 0
    assert len(out.strip().splitlines()) == 1
    json.loads(out)


def test_eval_accuracies(tmp_path, capsys):
    report = tmp_path / "report.json"
    report.write_text(json.dumps({"in": 20, "out": 25, "total": 45, "events": []}))
    truth = tmp_path / "truth.json"
    truth.write_text(json.dumps({"true_in": 20, "true_out": 28, "true_total": 48}))
    code = main(["eval", "--report", str(report), "--truth", str(truth)])
    out = capsys.readouterr().out
    assert code == 0
    doc = json.loads(out)
    assert doc["tc_accuracy"] == 93.75
    assert doc["in_accuracy"] == 100.0
    assert doc["out_accuracy"] == round(25 / 28 * 100, 2)


def test_eval_equal_counts_all_hundred(tmp_path, capsys):
    report = tmp_path / "report.json"
    report.write_text(json.dumps({"in": 9, "out": 12, "total": 21}))
    truth = tmp_path / "truth.json"
    truth.write_text(json.dumps({"true_in": 9, "true_out": 12, "true_total": 21}))
    code = main(["eval", "--report", str(report), "--truth", str(truth)])
    doc = json.loads(capsys.readouterr().out)
    assert code == 0
    assert doc == {"in_accuracy": 100.0, "out_accuracy": 100.0, "tc_accuracy": 100.0}


def test_eval_undefined_accuracy_is_config_error(tmp_path, capsys):
    report = tmp_path / "report.json"
    report.write_text(json.dumps({"in": 3, "out": 0, "total": 3}))
    truth = tmp_path / "truth.json"
    truth.write_text(json.dumps({"true_in": 0, "true_out": 3, "true_total": 3}))
    code = main(["eval", "--report", str(report), "--truth", str(truth)])
    assert code == 2
    assert "0" in capsys.readouterr().err


def test_eval_schema_mismatch(tmp_path, capsys):
    report = tmp_path / "report.json"
    report.write_text(json.dumps({"inn": 3}))
    truth = tmp_path / "truth.json"
    truth.write_text(json.dumps({"true_in": 1, "true_out": 0, "true_total": 1}))
    code = main(["eval", "--report", str(report), "--truth", str(truth)])
    assert code == 2
    capsys.readouterr()


def test_unknown_flag_rejected(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["count", "--input", str(tmp_path), "--frobnicate"])
    assert exc.value.code == 2
