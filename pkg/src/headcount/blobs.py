"""Connected-component blob extraction and head-shaped keypoint filtering.

Foreground components are labeled with a two-pass union-find over row runs,
measured (area, perimeter, centroid, convex hull, second moments), scored with
the usual shape metrics (circularity, convexity, inertia ratio), and filtered
to the round compact blobs a head produces. Coordinates are (x, y) with x the
column and y the row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .background import BinaryMask
from .errors import ConfigError, DegenerateBlob, NotFound

_SQRT2 = math.sqrt(2.0)


@dataclass(eq=False)
class ComponentLabels:
    """Per-pixel component ids: 0 = background, 1..count = components in
    raster-scan first-encounter order."""

    labels: np.ndarray
    count: int

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]


@dataclass(frozen=True)
class BlobMeasurements:
    """Raw geometry of one component.

    ``perimeter`` is a boundary-length estimate, ``hull_area`` counts the
    pixels covered by the convex hull of the component (0 when the component
    is too small or collinear to span a hull), ``second_moments`` are the
    central (co)variances (mxx, myy, mxy) of the pixel coordinates.
    """

    area: int
    perimeter: float
    centroid: tuple[float, float]
    hull_area: float
    second_moments: tuple[float, float, float]


@dataclass(frozen=True)
class BlobKeypoint:
    """A detected blob: centroid (x, y), equivalent-circle diameter, and its
    shape scores."""

    centroid: tuple[float, float]
    diameter_s: float
    circularity: float
    convexity: float
    inertia_ratio: float


@dataclass
class BlobFilterParams:
    """Thresholds a component must pass to become a keypoint.

    ``max_area=None`` means a quarter of the mask area, resolved per call.
    Defaults are tuned for head-sized round blobs.
    """

    min_area: int = 80
    max_area: Optional[int] = None
    min_circularity: float = 0.5
    min_convexity: float = 0.7
    min_inertia_ratio: float = 0.3

    def __post_init__(self):
        if self.min_area < 1:
            raise ConfigError(f"min_area must be >= 1, got {self.min_area}")
        if self.max_area is not None and self.max_area < self.min_area:
            raise ConfigError("max_area must be >= min_area")
        for name in ("min_circularity", "min_convexity", "min_inertia_ratio"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0,1], got {v}")


def label_components(mask: BinaryMask, connectivity: int = 8) -> ComponentLabels:
    """Label connected foreground regions.

    Two passes over horizontal runs: the first unions runs of adjacent rows
    that touch under the given connectivity, the second resolves the
    equivalences and numbers components by the raster position of their first
    run, so equal masks always produce identical label arrays.
    """
    if connectivity not in (4, 8):
        raise ConfigError(f"connectivity must be 4 or 8, got {connectivity}")
    bits = mask.bits
    h, w = bits.shape

    ext = np.zeros((h, w + 2), dtype=np.int8)
    ext[:, 1:-1] = bits
    edges = np.diff(ext, axis=1)
    srow, scol = np.nonzero(edges == 1)    # run starts at scol
    _, ecol = np.nonzero(edges == -1)      # exclusive run ends
    n_runs = len(srow)
    if n_runs == 0:
        return ComponentLabels(np.zeros((h, w), dtype=np.int32), 0)

    c0 = scol.tolist()
    c1 = ecol.tolist()
    parent = list(range(n_runs))

    # first pass: union runs in vertically adjacent rows that touch
    touch = 1 if connectivity == 8 else 0
    row_starts = np.searchsorted(srow, np.arange(h + 1)).tolist()
    for r in range(1, h):
        i, i_end = row_starts[r - 1], row_starts[r]
        j, j_end = row_starts[r], row_starts[r + 1]
        while i < i_end and j < j_end:
            ei, ej = c1[i], c1[j]
            if c0[i] < ej + touch and c0[j] < ei + touch:
                ri = i
                while parent[ri] != ri:
                    ri = parent[ri]
                rj = j
                while parent[rj] != rj:
                    rj = parent[rj]
                root = ri if ri < rj else rj
                parent[ri] = parent[rj] = parent[i] = parent[j] = root
            # the run ending first cannot touch anything further right
            if ei <= ej:
                i += 1
            else:
                j += 1

    # second pass: resolve roots, number components in first-encounter order
    component_of: dict[int, int] = {}
    run_component = np.empty(n_runs, dtype=np.int32)
    for i in range(n_runs):
        root = i
        while parent[root] != root:
            root = parent[root]
        parent[i] = root
        comp = component_of.get(root)
        if comp is None:
            comp = len(component_of) + 1
            component_of[root] = comp
        run_component[i] = comp

    # paint runs: +comp at each start, -comp past each end, then prefix-sum
    delta = np.zeros(h * w + 1, dtype=np.int32)
    delta[srow * w + scol] += run_component
    delta[srow * w + ecol] -= run_component
    labels = np.cumsum(delta[:-1], dtype=np.int32).reshape(h, w)
    return ComponentLabels(labels, len(component_of))


def _perimeter_crofton(comp: np.ndarray) -> float:
    # Cauchy-Crofton over four line directions: boundary crossings along
    # rows, columns and both diagonals, diagonal families spaced 1/sqrt(2)
    p = np.pad(comp, 1).astype(np.int8)
    n_h = int(np.abs(np.diff(p, axis=1)).sum())
    n_v = int(np.abs(np.diff(p, axis=0)).sum())
    n_d = int(np.abs(p[1:, 1:] - p[:-1, :-1]).sum())
    n_d += int(np.abs(p[1:, :-1] - p[:-1, 1:]).sum())
    return math.pi / 8.0 * (n_h + n_v + n_d / _SQRT2)


def _convex_hull(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    # Andrew monotone chain; strict turns, so collinear inputs yield < 3 vertices
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    hull: list[tuple[int, int]] = []
    for chain in (pts, pts[::-1]):
        base = len(hull)
        for p in chain:
            while len(hull) - base >= 2 and cross(hull[-2], hull[-1], p) <= 0:
                hull.pop()
            hull.append(p)
        hull.pop()
    return hull


def _hull_pixel_count(points: list[tuple[int, int]]) -> int:
    """Pixels covered by the convex hull of integer points; 0 if degenerate.

    Integer-exact via the shoelace polygon area plus Pick's theorem:
    covered = interior + boundary = area + boundary/2 + 1.
    """
    hull = _convex_hull(points)
    if len(hull) < 3:
        return 0
    twice_area = 0
    boundary = 0
    for (x1, y1), (x2, y2) in zip(hull, hull[1:] + hull[:1]):
        twice_area += x1 * y2 - x2 * y1
        boundary += math.gcd(abs(x2 - x1), abs(y2 - y1))
    twice_area = abs(twice_area)
    # twice_area and boundary are both even or both odd, sum below is integral
    return (twice_area + boundary + 2) // 2


def measure(labels: ComponentLabels, component_id: int) -> BlobMeasurements:
    """Measure one labeled component.

    Raises NotFound for ids outside 1..count.
    """
    if not 1 <= component_id <= labels.count:
        raise NotFound(f"component {component_id} not in 1..{labels.count}")
    ys, xs = np.nonzero(labels.labels == component_id)
    area = len(xs)

    # crop to the bounding box before boundary counting
    y0, y1 = ys.min(), ys.max()
    x0, x1 = xs.min(), xs.max()
    comp = labels.labels[y0:y1 + 1, x0:x1 + 1] == component_id
    perimeter = _perimeter_crofton(comp)

    xf = xs.astype(np.float64)
    yf = ys.astype(np.float64)
    cx = float(xf.mean())
    cy = float(yf.mean())
    mxx = float(np.mean((xf - cx) ** 2))
    myy = float(np.mean((yf - cy) ** 2))
    mxy = float(np.mean((xf - cx) * (yf - cy)))

    hull_area = float(_hull_pixel_count(list(zip(xs.tolist(), ys.tolist()))))
    return BlobMeasurements(
        area=area,
        perimeter=perimeter,
        centroid=(cx, cy),
        hull_area=hull_area,
        second_moments=(mxx, myy, mxy),
    )


def circularity(m: BlobMeasurements) -> float:
    """4*pi*area / perimeter^2; 1 for an ideal disk."""
    if m.perimeter <= 0.0:
        raise DegenerateBlob("zero perimeter")
    return 4.0 * math.pi * m.area / (m.perimeter * m.perimeter)


def convexity(m: BlobMeasurements) -> float:
    """area / hull_area, in (0, 1]; hulls are degenerate for collinear blobs."""
    if m.hull_area <= 0.0:
        raise DegenerateBlob("convex hull is degenerate (collinear blob)")
    return m.area / m.hull_area


def inertia_ratio(m: BlobMeasurements) -> float:
    """Ratio of the smaller to the larger principal second moment, in [0,1].

    1 for rotationally symmetric blobs, 0 for one-pixel-thin lines.
    """
    if m.area < 2:
        raise DegenerateBlob("inertia ratio needs at least 2 pixels")
    mxx, myy, mxy = m.second_moments
    mean = (mxx + myy) / 2.0
    # hypot keeps lmin exactly 0 when the cross moment vanishes
    half_spread = math.hypot((mxx - myy) / 2.0, mxy)
    lmax = mean + half_spread
    lmin = mean - half_spread
    if lmax <= 0.0:
        raise DegenerateBlob("zero spread")
    return max(0.0, lmin) / lmax


def detect_blobs(mask: BinaryMask, params: Optional[BlobFilterParams] = None,
                 connectivity: int = 8) -> list[BlobKeypoint]:
    """Extract keypoints for every component passing all shape filters.

    Components whose shape metrics are undefined (single pixels, one-pixel
    lines) are never emitted. Output order follows component label order.
    """
    if params is None:
        params = BlobFilterParams()
    labels = label_components(mask, connectivity)
    max_area = params.max_area
    if max_area is None:
        max_area = (mask.width * mask.height) // 4

    areas = np.bincount(labels.labels.ravel(), minlength=labels.count + 1)
    keypoints = []
    for cid in range(1, labels.count + 1):
        if not params.min_area <= areas[cid] <= max_area:
            continue
        m = measure(labels, cid)
        try:
            circ = circularity(m)
            conv = convexity(m)
            inertia = inertia_ratio(m)
        except DegenerateBlob:
            continue
        if circ < params.min_circularity:
            continue
        if conv < params.min_convexity:
            continue
        if inertia < params.min_inertia_ratio:
            continue
        keypoints.append(BlobKeypoint(
            centroid=m.centroid,
            diameter_s=2.0 * math.sqrt(m.area / math.pi),
            circularity=circ,
            convexity=conv,
            inertia_ratio=inertia,
        ))
    return keypoints
