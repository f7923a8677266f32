"""Grayscale frame I/O: binary PGM (P5) files, frame sequences, debug overlays.

Sequences come either from a directory of numbered ``.pgm`` files or from a
single headerless file of concatenated raw frames whose geometry is supplied
by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, Sequence, TYPE_CHECKING

import numpy as np

from .errors import ConfigError, EmptySequence, ParseError, TruncatedStream, UnsupportedFormat

if TYPE_CHECKING:
    from .blobs import BlobKeypoint
    from .counting import LinePair

_WHITESPACE = b" \t\r\n\v\f"


@dataclass(frozen=True, eq=False)
class Frame:
    """One 8-bit grayscale frame.

    ``pixels`` is a row-major ``(height, width)`` uint8 array; ``index`` is the
    frame's ordinal within its sequence.
    """

    width: int
    height: int
    index: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.pixels.shape != (self.height, self.width):
            raise ValueError(
                f"pixel array shape {self.pixels.shape} does not match "
                f"{self.width}x{self.height}"
            )
        if self.pixels.dtype != np.uint8:
            raise ValueError(f"pixels must be uint8, got {self.pixels.dtype}")
        if self.index < 0:
            raise ValueError("frame index must be >= 0")


@dataclass
class SequenceSpec:
    """Where a frame sequence lives and how to read it.

    ``source`` is either a directory of ``.pgm`` files (frame order = sorted
    zero-padded file names) or a raw file of concatenated frames, in which
    case ``width`` and ``height`` are required. ``fps`` is carried as metadata
    only; nothing in the pipeline is time-based.
    """

    source: Path
    width: Optional[int] = None
    height: Optional[int] = None
    fps: float = 25.0

    def __post_init__(self):
        self.source = Path(self.source)


def _read_header_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # skip whitespace and '#' comments, then take one token
    n = len(data)
    while pos < n:
        c = data[pos:pos + 1]
        if c in _WHITESPACE:
            pos += 1
        elif c == b"#":
            while pos < n and data[pos:pos + 1] != b"\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos:pos + 1] not in _WHITESPACE:
        pos += 1
    if start == pos:
        raise ParseError("unexpected end of PGM header")
    return data[start:pos], pos


def load_frame(path, index: int = 0) -> Frame:
    """Read one binary PGM (P5, maxval 255) file.

    Raises ParseError for anything that is not well-formed binary PGM
    (including ASCII "P2" files) and UnsupportedFormat when maxval is not 255.
    """
    data = Path(path).read_bytes()
    magic, pos = _read_header_token(data, 0)
    if magic == b"P2":
        raise ParseError(f"{path}: ASCII PGM (P2) is not supported, use binary P5")
    if magic != b"P5":
        raise ParseError(f"{path}: not a binary PGM file (magic {magic!r})")
    fields = []
    for name in ("width", "height", "maxval"):
        token, pos = _read_header_token(data, pos)
        try:
            value = int(token)
        except ValueError:
            raise ParseError(f"{path}: non-numeric {name} field {token!r}") from None
        if value <= 0:
            raise ParseError(f"{path}: {name} must be positive, got {value}")
        fields.append(value)
    width, height, maxval = fields
    if maxval != 255:
        raise UnsupportedFormat(f"{path}: maxval {maxval} unsupported (need 255)")
    if pos >= len(data) or data[pos:pos + 1] not in _WHITESPACE:
        raise ParseError(f"{path}: missing whitespace after maxval")
    pos += 1
    raster = data[pos:pos + width * height]
    if len(raster) < width * height:
        raise ParseError(f"{path}: truncated pixel data "
                         f"({len(raster)} of {width * height} bytes)")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return Frame(width=width, height=height, index=index, pixels=pixels.copy())


def write_frame(frame: Frame, path) -> None:
    """Write a frame as binary PGM (P5, maxval 255)."""
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + frame.pixels.tobytes())


def open_sequence(spec: SequenceSpec) -> Iterator[Frame]:
    """Stream frames from a SequenceSpec, indices 0,1,2,... in order.

    Directory sources yield their ``.pgm`` files in sorted-name order; raw
    sources are split into width*height chunks. Raises EmptySequence when the
    source holds no frames and TruncatedStream when a raw file's size is not
    a multiple of the frame size.
    """
    src = spec.source
    if not src.exists():
        raise FileNotFoundError(f"sequence source {src} does not exist")
    if src.is_dir():
        paths = sorted(p for p in src.iterdir() if p.suffix.lower() == ".pgm")
        if not paths:
            raise EmptySequence(f"no .pgm files in {src}")
        for i, p in enumerate(paths):
            yield load_frame(p, index=i)
        return

    if spec.width is None or spec.height is None:
        raise ConfigError("raw sequences need explicit width and height")
    frame_size = spec.width * spec.height
    total = src.stat().st_size
    if total % frame_size != 0:
        raise TruncatedStream(
            f"{src}: size {total} is not a multiple of frame size {frame_size}"
        )
    count = total // frame_size
    if count == 0:
        raise EmptySequence(f"{src} holds no complete frames")
    with open(src, "rb") as fh:
        for i in range(count):
            raster = fh.read(frame_size)
            pixels = np.frombuffer(raster, dtype=np.uint8).reshape(spec.height, spec.width)
            yield Frame(width=spec.width, height=spec.height, index=i, pixels=pixels.copy())


def circle_points(radius: int) -> list[tuple[int, int]]:
    """Integer offsets of a one-pixel-wide circle outline of the given radius.

    Midpoint rasterization: for each x in the first octant pick the y nearest
    to the true circle, then mirror into all eight octants.
    """
    pts = set()
    x = 0
    while True:
        y = round(math.sqrt(radius * radius - x * x))
        if x > y:
            break
        for px, py in ((x, y), (y, x)):
            pts.update({(px, py), (-px, py), (px, -py), (-px, -py)})
        x += 1
    return sorted(pts)


def write_annotated(frame: Frame, keypoints: Sequence["BlobKeypoint"],
                    lines: "LinePair", path) -> None:
    """Write a debug copy of ``frame`` with keypoint circles and both counting
    lines burned in at intensity 255. The input frame is left untouched."""
    for kp in keypoints:
        x, y = kp.centroid
        if not (0 <= x < frame.width and 0 <= y < frame.height):
            raise ValueError(f"keypoint centroid {kp.centroid} outside frame bounds")
    if not (0 <= lines.line_in_y < frame.height and 0 <= lines.line_out_y < frame.height):
        raise ValueError("counting lines outside frame bounds")

    out = frame.pixels.copy()
    out[lines.line_in_y, :] = 255
    out[lines.line_out_y, :] = 255
    for kp in keypoints:
        cx = int(round(kp.centroid[0]))
        cy = int(round(kp.centroid[1]))
        radius = max(1, int(round(kp.diameter_s / 2.0)))
        for dx, dy in circle_points(radius):
            px, py = cx + dx, cy + dy
            if 0 <= px < frame.width and 0 <= py < frame.height:
                out[py, px] = 255
    write_frame(Frame(frame.width, frame.height, frame.index, out), path)
