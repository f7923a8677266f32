"""Identity-stable centroid tracking across frames.

Matching is greedy globally-nearest: the closest (track, keypoint) pair within
the distance gate is paired first, then the next closest among the rest, with
deterministic tie-breaking. Entrance cameras see small frame-to-frame motion
relative to person spacing, so this is as good as optimal assignment here and
keeps the tracker a pure function of the last centroids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .blobs import BlobKeypoint
from .counting import LineZoneState
from .errors import ConfigError, OrderError


@dataclass
class TrackerConfig:
    max_match_distance: float = 50.0
    max_missed: int = 5

    def __post_init__(self):
        if self.max_match_distance <= 0:
            raise ConfigError("max_match_distance must be > 0")
        if self.max_missed < 0:
            raise ConfigError("max_missed must be >= 0")


@dataclass(eq=False)
class Track:
    """One tracked object: id, observation history, and line-zone state."""

    id: int
    history: list[tuple[int, tuple[float, float]]] = field(default_factory=list)
    missed: int = 0
    zone_state: LineZoneState = field(default_factory=LineZoneState)
    alive: bool = True

    @property
    def position(self) -> tuple[float, float]:
        return self.history[-1][1]

    @property
    def last_frame(self) -> int:
        return self.history[-1][0]


@dataclass
class Assignment:
    """Result of matching tracks to keypoints; keypoints are referenced by
    their index in the input list."""

    matches: list[tuple[Track, int]]
    unmatched_tracks: list[Track]
    unmatched_keypoints: list[int]


def associate(tracks: list[Track], keypoints: list[BlobKeypoint],
              cfg: TrackerConfig) -> Assignment:
    """Greedy nearest-pair matching within the distance gate.

    Candidate pairs are taken in order of (distance, track id, keypoint
    index), each track and keypoint used at most once.
    """
    candidates = []
    for track in tracks:
        tx, ty = track.position
        for k, kp in enumerate(keypoints):
            d = math.hypot(kp.centroid[0] - tx, kp.centroid[1] - ty)
            if d <= cfg.max_match_distance:
                candidates.append((d, track.id, k))
    candidates.sort()

    by_id = {t.id: t for t in tracks}
    used_tracks: set[int] = set()
    used_keypoints: set[int] = set()
    matches = []
    for d, tid, k in candidates:
        if tid in used_tracks or k in used_keypoints:
            continue
        used_tracks.add(tid)
        used_keypoints.add(k)
        matches.append((by_id[tid], k))
    unmatched_tracks = [t for t in tracks if t.id not in used_tracks]
    unmatched_keypoints = [k for k in range(len(keypoints)) if k not in used_keypoints]
    return Assignment(matches, unmatched_tracks, unmatched_keypoints)


class Tracker:
    """Owns the live track list for one stream; call step() once per frame."""

    def __init__(self, cfg: TrackerConfig | None = None):
        self.cfg = cfg or TrackerConfig()
        self.tracks: list[Track] = []
        self._next_id = 0

    def step(self, keypoints: list[BlobKeypoint],
             frame_index: int) -> tuple[list[int], list[int]]:
        """Advance one frame: match, age out, and spawn tracks.

        Returns (spawned ids, expired ids). Matched tracks get the keypoint
        centroid appended; unmatched tracks age and are dropped once missed
        exceeds max_missed; unmatched keypoints start fresh tracks with ids
        that are never reused.
        """
        for track in self.tracks:
            if track.history and frame_index <= track.last_frame:
                raise OrderError(
                    f"frame {frame_index} not after track {track.id}'s "
                    f"last frame {track.last_frame}"
                )

        assignment = associate(self.tracks, keypoints, self.cfg)
        for track, k in assignment.matches:
            track.history.append((frame_index, keypoints[k].centroid))
            track.missed = 0

        expired = []
        for track in assignment.unmatched_tracks:
            track.missed += 1
            if track.missed > self.cfg.max_missed:
                track.alive = False
                expired.append(track.id)
        if expired:
            self.tracks = [t for t in self.tracks if t.alive]

        spawned = []
        for k in assignment.unmatched_keypoints:
            track = Track(id=self._next_id,
                          history=[(frame_index, keypoints[k].centroid)])
            self._next_id += 1
            self.tracks.append(track)
            spawned.append(track.id)
        return spawned, expired
