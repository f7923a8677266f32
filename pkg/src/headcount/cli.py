"""Command-line front end: count people in a sequence, generate synthetic
scenes, and evaluate reports against ground truth.

Exit codes: 0 success, 1 I/O problems, 2 configuration/validation problems.
stdout carries exactly one JSON document per successful invocation; all
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .blobs import BlobFilterParams
from .counting import LinePair
from .errors import (ConfigError, EmptySequence, HeadcountError, OrderError,
                     ParseError, ShapeError, TruncatedStream, UndefinedAccuracy,
                     UnsupportedFormat)
from .frame_io import SequenceSpec, open_sequence, write_annotated
from .metrics import GroundTruth, accuracy_pct
from .pipeline import CountingPipeline, PipelineConfig
from .synthetic import SceneSpec, ground_truth_events, render_scene
from .tracking import TrackerConfig
from . import frame_io

_IO_ERRORS = (OSError, ParseError, UnsupportedFormat, EmptySequence, TruncatedStream)
_CONFIG_ERRORS = (ConfigError, UndefinedAccuracy, ShapeError, OrderError,
                  json.JSONDecodeError)

# flat config keys; a --config file uses the same names as the flags
_DEFAULTS = {
    "lines": None,
    "invert_direction": False,
    "alpha": 0.02,
    "threshold": 25.0,
    "warmup": 30,
    "morph_radius": 1,
    "connectivity": 8,
    "min_area": 80,
    "max_area": None,
    "min_circularity": 0.5,
    "min_convexity": 0.7,
    "min_inertia": 0.3,
    "max_match_dist": 50.0,
    "max_missed": 5,
}


def _parse_lines(text) -> LinePair:
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(",")
    if len(parts) != 2:
        raise ConfigError(f"lines must be Y1,Y2 with Y1 < Y2, got {text!r}")
    try:
        y1, y2 = int(parts[0]), int(parts[1])
    except (TypeError, ValueError):
        raise ConfigError(f"lines must be two integers, got {text!r}") from None
    return LinePair(y1, y2)


def _parse_geometry(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise ConfigError(f"geometry must be WxH, got {text!r}") from None


def _load_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return doc


def _load_truth(path) -> GroundTruth:
    doc = _load_json(path)
    try:
        return GroundTruth(doc["true_in"], doc["true_out"], doc["true_total"])
    except KeyError as exc:
        raise ConfigError(f"{path}: missing ground-truth key {exc}") from exc


def _effective_settings(args) -> dict:
    settings = dict(_DEFAULTS)
    if args.config:
        file_conf = _load_json(args.config)
        unknown = set(file_conf) - set(_DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        settings.update(file_conf)
    for key in _DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _build_config(settings: dict) -> PipelineConfig:
    if settings["lines"] is None:
        raise ConfigError("counting lines are required (--lines Y1,Y2)")
    lines = settings["lines"]
    if not isinstance(lines, LinePair):
        lines = _parse_lines(lines)
    blob = BlobFilterParams(
        min_area=int(settings["min_area"]),
        max_area=None if settings["max_area"] is None else int(settings["max_area"]),
        min_circularity=float(settings["min_circularity"]),
        min_convexity=float(settings["min_convexity"]),
        min_inertia_ratio=float(settings["min_inertia"]),
    )
    tracker = TrackerConfig(
        max_match_distance=float(settings["max_match_dist"]),
        max_missed=int(settings["max_missed"]),
    )
    return PipelineConfig(
        lines=lines,
        alpha=float(settings["alpha"]),
        threshold=float(settings["threshold"]),
        warmup=int(settings["warmup"]),
        morph_radius=int(settings["morph_radius"]),
        connectivity=int(settings["connectivity"]),
        blob=blob,
        tracker=tracker,
        invert_direction=bool(settings["invert_direction"]),
    )


def cmd_count(args) -> int:
    settings = _effective_settings(args)
    config = _build_config(settings)
    truth = _load_truth(args.truth) if args.truth else None

    spec = SequenceSpec(source=Path(args.input))
    if args.raw:
        spec.width, spec.height = _parse_geometry(args.raw)
    if not spec.source.exists():
        raise FileNotFoundError(f"input {spec.source} does not exist")

    annotate_dir = None
    if args.annotate:
        annotate_dir = Path(args.annotate)
        annotate_dir.mkdir(parents=True, exist_ok=True)

    pipeline = CountingPipeline(config)
    for frame in open_sequence(spec):
        pipeline.process_frame(frame)
        if annotate_dir is not None:
            write_annotated(frame, pipeline.last_keypoints, config.lines,
                            annotate_dir / f"{frame.index:06d}.pgm")
    if pipeline.frames_processed == 0:
        raise EmptySequence("empty sequence")

    report = pipeline.report(truth)
    print(report.to_json())
    return 0


def cmd_synth(args) -> int:
    doc = _load_json(args.spec)
    lines_doc = doc.pop("lines", None)
    scene = SceneSpec.from_dict(doc)
    if args.seed is not None:
        scene.seed = args.seed
    if scene.frames < 1:
        raise ConfigError("scene must have at least 1 frame")

    lines = None
    if args.lines is not None:
        lines = _parse_lines(args.lines)
    elif lines_doc is not None:
        lines = _parse_lines(lines_doc)
    if lines is None:
        raise ConfigError("counting lines are required to compute ground truth "
                          "(--lines or a \"lines\" entry in the scene spec)")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for frame in render_scene(scene):
        frame_io.write_frame(frame, out_dir / f"{frame.index:06d}.pgm")

    truth, _ = ground_truth_events(scene, lines)
    truth_doc = {"true_in": truth.true_in, "true_out": truth.true_out,
                 "true_total": truth.true_total}
    (out_dir / "truth.json").write_text(json.dumps(truth_doc, sort_keys=True) + "\n",
                                        encoding="utf-8")
    print(json.dumps({"frames": scene.frames, "out": str(out_dir), **truth_doc},
                     sort_keys=True))
    return 0


def cmd_eval(args) -> int:
    report = _load_json(args.report)
    truth = _load_truth(args.truth)
    try:
        counted = {k: int(report[k]) for k in ("in", "out", "total")}
    except (KeyError, TypeError, ValueError):
        raise ConfigError(f"{args.report}: not a count report "
                          "(need integer in/out/total)") from None
    result = {
        "in_accuracy": round(accuracy_pct(counted["in"], truth.true_in), 2),
        "out_accuracy": round(accuracy_pct(counted["out"], truth.true_out), 2),
        "tc_accuracy": round(accuracy_pct(counted["total"], truth.true_total), 2),
    }
    print(json.dumps(result, sort_keys=True))
    return 0


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lines", help="counting rows as Y1,Y2 (Y1 above Y2)")
    p.add_argument("--invert-direction", dest="invert_direction",
                   action="store_const", const=True, default=None,
                   help="count downward crossings as OUT instead of IN")
    p.add_argument("--alpha", type=float, help="background learning rate in (0,1)")
    p.add_argument("--threshold", type=float, help="foreground intensity threshold")
    p.add_argument("--warmup", type=int, help="frames used only to settle the background")
    p.add_argument("--morph-radius", dest="morph_radius", type=int,
                   help="opening radius for mask cleanup (0 disables)")
    p.add_argument("--connectivity", type=int, choices=(4, 8), help="blob connectivity")
    p.add_argument("--min-area", dest="min_area", type=int, help="minimum blob area")
    p.add_argument("--max-area", dest="max_area", type=int, help="maximum blob area")
    p.add_argument("--min-circularity", dest="min_circularity", type=float)
    p.add_argument("--min-convexity", dest="min_convexity", type=float)
    p.add_argument("--min-inertia", dest="min_inertia", type=float)
    p.add_argument("--max-match-dist", dest="max_match_dist", type=float,
                   help="matching gate in pixels")
    p.add_argument("--max-missed", dest="max_missed", type=int,
                   help="frames a track may go unseen before expiring")
    p.add_argument("--config", help="JSON file with the same keys as the flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="headcount",
        description="Bidirectional people counting over grayscale frame sequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_count = sub.add_parser("count", help="count crossings in a frame sequence")
    p_count.add_argument("--input", required=True,
                         help="directory of .pgm frames, or a raw frame file")
    p_count.add_argument("--raw", help="raw-file frame geometry as WxH")
    p_count.add_argument("--truth", help="ground-truth JSON for accuracy fields")
    p_count.add_argument("--annotate", help="directory for annotated debug frames")
    _add_pipeline_flags(p_count)
    p_count.set_defaults(func=cmd_count)

    p_synth = sub.add_parser("synth", help="render a synthetic scene + truth.json")
    p_synth.add_argument("--spec", required=True, help="scene spec JSON")
    p_synth.add_argument("--out", required=True, help="output directory")
    p_synth.add_argument("--seed", type=int, help="override the spec's noise seed")
    p_synth.add_argument("--lines", help="counting rows Y1,Y2 for the ground truth")
    p_synth.set_defaults(func=cmd_synth)

    p_eval = sub.add_parser("eval", help="compare a report against ground truth")
    p_eval.add_argument("--report", required=True, help="count report JSON")
    p_eval.add_argument("--truth", required=True, help="ground-truth JSON")
    p_eval.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _IO_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except HeadcountError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
