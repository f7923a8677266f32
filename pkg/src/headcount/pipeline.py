"""Per-frame dataflow: subtract -> clean -> detect -> track -> count.

Stages are composed feed-forward with no feedback paths, so each one stays
independently testable. Only the current frame is held in memory; state is
the background estimate, the live tracks, and the counters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

from .background import (DEFAULT_ALPHA, DEFAULT_THRESHOLD, DEFAULT_WARMUP,
                         BackgroundModel, morph_open)
from .blobs import BlobFilterParams, BlobKeypoint, detect_blobs
from .counting import Counters, CrossEvent, LinePair, advance, apply_event
from .errors import ConfigError, EmptySequence, OrderError, ShapeError
from .frame_io import Frame
from .metrics import CountReport, GroundTruth, build_report
from .tracking import Tracker, TrackerConfig

MIN_FRAME_SIDE = 8


@dataclass
class PipelineConfig:
    """Effective configuration of one counting run."""

    lines: LinePair
    alpha: float = DEFAULT_ALPHA
    threshold: float = DEFAULT_THRESHOLD
    warmup: int = DEFAULT_WARMUP
    morph_radius: int = 1
    connectivity: int = 8
    blob: BlobFilterParams = field(default_factory=BlobFilterParams)
    tracker: TrackerConfig = field(default_factory=TrackerConfig)
    invert_direction: bool = False

    def __post_init__(self):
        if self.morph_radius < 0:
            raise ConfigError("morph_radius must be >= 0")
        if self.connectivity not in (4, 8):
            raise ConfigError("connectivity must be 4 or 8")

    def to_params_dict(self) -> dict[str, Any]:
        """Flat snapshot of every effective parameter, for the report."""
        return {
            "lines": [self.lines.line_in_y, self.lines.line_out_y],
            "invert_direction": self.invert_direction,
            "alpha": self.alpha,
            "threshold": self.threshold,
            "warmup": self.warmup,
            "morph_radius": self.morph_radius,
            "connectivity": self.connectivity,
            "min_area": self.blob.min_area,
            "max_area": self.blob.max_area,
            "min_circularity": self.blob.min_circularity,
            "min_convexity": self.blob.min_convexity,
            "min_inertia": self.blob.min_inertia_ratio,
            "max_match_dist": self.tracker.max_match_distance,
            "max_missed": self.tracker.max_missed,
        }


class CountingPipeline:
    """Streaming people counter over one ordered frame sequence."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.counters = Counters()
        self.events: list[CrossEvent] = []
        self.frames_processed = 0
        self.last_keypoints: list[BlobKeypoint] = []
        self._model: Optional[BackgroundModel] = None
        self._tracker = Tracker(config.tracker)
        self._next_index = 0

    def _init_model(self, frame: Frame) -> None:
        if frame.width < MIN_FRAME_SIDE or frame.height < MIN_FRAME_SIDE:
            raise ConfigError(
                f"frames must be at least {MIN_FRAME_SIDE}x{MIN_FRAME_SIDE}, "
                f"got {frame.width}x{frame.height}"
            )
        if self.config.lines.line_out_y >= frame.height:
            raise ConfigError(
                f"counting lines {self.config.lines.line_in_y},"
                f"{self.config.lines.line_out_y} do not fit a frame of height "
                f"{frame.height}"
            )
        self._model = BackgroundModel(frame, alpha=self.config.alpha,
                                      threshold=self.config.threshold,
                                      warmup=self.config.warmup)

    def process_frame(self, frame: Frame) -> list[CrossEvent]:
        """Run all stages on one frame and return the crossings it produced."""
        if frame.index != self._next_index:
            raise OrderError(f"expected frame {self._next_index}, got {frame.index}")
        self._next_index += 1
        self.frames_processed += 1

        if self._model is None:
            self._init_model(frame)
        else:
            if (frame.width, frame.height) != (self._model.width, self._model.height):
                raise ShapeError("frame geometry changed mid-stream")
            self._model.update(frame)

        if frame.index < self.config.warmup:
            self.last_keypoints = []
            return []

        mask = self._model.subtract(frame)
        if self.config.morph_radius > 0:
            mask = morph_open(mask, self.config.morph_radius)
        keypoints = detect_blobs(mask, self.config.blob, self.config.connectivity)
        self.last_keypoints = keypoints

        self._tracker.step(keypoints, frame.index)
        new_events = []
        for track in self._tracker.tracks:
            if track.last_frame != frame.index:
                continue  # not observed this frame, no new position to classify
            event = advance(track.zone_state, track.position, self.config.lines,
                            frame.index, track.id)
            if event is None:
                continue
            if self.config.invert_direction:
                event = CrossEvent(event.frame, event.track_id,
                                   event.direction.flipped())
            apply_event(self.counters, event)
            new_events.append(event)
        self.events.extend(new_events)
        return new_events

    def report(self, ground_truth: Optional[GroundTruth] = None) -> CountReport:
        return build_report(self.counters, self.events, ground_truth,
                            self.config.to_params_dict())


def run(frames: Iterable[Frame], config: PipelineConfig,
        ground_truth: Optional[GroundTruth] = None) -> CountReport:
    """Fold the pipeline over a frame sequence and build the report."""
    pipeline = CountingPipeline(config)
    for frame in frames:
        pipeline.process_frame(frame)
    if pipeline.frames_processed == 0:
        raise EmptySequence("no frames to process")
    return pipeline.report(ground_truth)
