"""Two-virtual-line crossing semantics and the IN/OUT counters.

Two horizontal lines split the image into zone A (above the first line),
zone M (between, boundary rows included), and zone B (below the second).
A count requires a full traversal: a track whose origin zone is A scores IN
the moment it reaches B, and vice versa for OUT. Touching or oscillating
around a single line never counts, which is what disambiguates simultaneous
crossers that defeat a single tripwire.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigError


class Zone(str, enum.Enum):
    A = "A"   # above both lines
    M = "M"   # between the lines, boundaries included
    B = "B"   # below both lines


class Direction(str, enum.Enum):
    IN = "IN"
    OUT = "OUT"

    def flipped(self) -> "Direction":
        return Direction.OUT if self is Direction.IN else Direction.IN


@dataclass(frozen=True)
class LinePair:
    """The two counting rows; the IN line must lie above the OUT line."""

    line_in_y: int
    line_out_y: int

    def __post_init__(self):
        if self.line_in_y >= self.line_out_y:
            raise ConfigError(
                f"line_in_y ({self.line_in_y}) must be above "
                f"line_out_y ({self.line_out_y})"
            )


@dataclass
class LineZoneState:
    """Per-track traversal state: where the track started (or last scored)
    and where it currently is."""

    origin_zone: Optional[Zone] = None
    current_zone: Optional[Zone] = None


@dataclass(frozen=True)
class CrossEvent:
    frame: int
    track_id: int
    direction: Direction


@dataclass
class Counters:
    """Monotone IN/OUT/total counters; total always equals in + out."""

    in_count: int = 0
    out_count: int = 0
    total_count: int = 0


def classify_zone(centroid: tuple[float, float], lines: LinePair) -> Zone:
    """Zone of a centroid; points exactly on a line belong to the middle
    zone, which keeps a centroid resting on a line from chattering."""
    y = centroid[1]
    if y < lines.line_in_y:
        return Zone.A
    if y > lines.line_out_y:
        return Zone.B
    return Zone.M


def advance(state: LineZoneState, centroid: tuple[float, float], lines: LinePair,
            frame: int, track_id: int) -> Optional[CrossEvent]:
    """Feed one observed centroid into a track's traversal state.

    Returns a CrossEvent on the frame the far zone is first reached (zone
    jumps that skip M still score), after which the origin resets so each
    traversal counts exactly once. Mutates ``state`` in place.
    """
    zone = classify_zone(centroid, lines)
    if state.origin_zone is None:
        state.origin_zone = zone
    state.current_zone = zone

    event = None
    if state.origin_zone is Zone.A and zone is Zone.B:
        event = CrossEvent(frame=frame, track_id=track_id, direction=Direction.IN)
    elif state.origin_zone is Zone.B and zone is Zone.A:
        event = CrossEvent(frame=frame, track_id=track_id, direction=Direction.OUT)
    if event is not None:
        state.origin_zone = zone
    return event


def apply_event(counters: Counters, event: CrossEvent) -> Counters:
    """Apply one crossing to the counters (mutates and returns them)."""
    if event.direction is Direction.IN:
        counters.in_count += 1
    else:
        counters.out_count += 1
    counters.total_count += 1
    assert counters.total_count == counters.in_count + counters.out_count
    return counters
