"""Planar geometry: poses, polylines, segments, angle arithmetic, and
equal-arc-length contour partitioning.

All coordinates are millimeters, angles radians. Everything here is pure
and operates on immutable values.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterator, Sequence

TWO_PI = 2.0 * math.pi
COINCIDENT_EPS = 1e-9

Point = tuple[float, float]


class InfeasiblePartitionError(ValueError):
    """Contours cannot be split into the requested number of chords."""


def wrap_angle(theta: float) -> float:
    """Wrap an angle into the half-open interval (-pi, pi]."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    if -math.pi < theta <= math.pi:
        return theta  # already in range: keep it exact
    r = math.fmod(theta + math.pi, TWO_PI)
    if r <= 0.0:
        r += TWO_PI
    return r - math.pi


def angle_diff(a: float, b: float) -> float:
    """Signed difference a - b on the circle, wrapped into (-pi, pi]."""
    return wrap_angle(a - b)


def dist(a: Point, b: Point) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


@dataclass(frozen=True)
class Pose:
    """Planar pose; heading is normalised into (-pi, pi] at construction."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("pose coordinates must be finite")
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    @property
    def position(self) -> Point:
        return (self.x, self.y)

    def distance_to(self, other: "Pose") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)


@dataclass(frozen=True)
class Segment:
    """Directed chord between two distinct points."""

    a: Point
    b: Point

    def __post_init__(self):
        if dist(self.a, self.b) <= COINCIDENT_EPS:
            raise ValueError("segment endpoints must be distinct")

    @property
    def length(self) -> float:
        return dist(self.a, self.b)

    @property
    def midpoint(self) -> Point:
        return ((self.a[0] + self.b[0]) / 2.0, (self.a[1] + self.b[1]) / 2.0)

    @property
    def orientation(self) -> float:
        return wrap_angle(math.atan2(self.b[1] - self.a[1], self.b[0] - self.a[0]))


@dataclass(frozen=True)
class Polyline:
    """Ordered vertex chain; ``closed`` adds an implicit edge back to the start.

    Consecutive vertices must be distinct. A closed polyline does not repeat
    its first vertex (a trailing duplicate is dropped at construction).
    """

    points: tuple[Point, ...]
    closed: bool = False

    def __post_init__(self):
        pts = [(float(x), float(y)) for x, y in self.points]
        if self.closed and len(pts) > 2 and dist(pts[0], pts[-1]) <= COINCIDENT_EPS:
            pts = pts[:-1]
        if len(pts) < 2:
            raise ValueError("polyline needs at least 2 points")
        for p, q in zip(pts, pts[1:]):
            if dist(p, q) <= COINCIDENT_EPS:
                raise ValueError(f"coincident consecutive points near {p}")
        if self.closed and dist(pts[-1], pts[0]) <= COINCIDENT_EPS:
            raise ValueError("closing edge of closed polyline is degenerate")
        object.__setattr__(self, "points", tuple(pts))

    def edges(self) -> Iterator[tuple[Point, Point]]:
        yield from zip(self.points, self.points[1:])
        if self.closed:
            yield self.points[-1], self.points[0]

    @property
    def perimeter(self) -> float:
        return sum(dist(p, q) for p, q in self.edges())

    def translated(self, dx: float, dy: float) -> "Polyline":
        return Polyline(tuple((x + dx, y + dy) for x, y in self.points), self.closed)

    def scaled(self, factor: float, about: Point = (0.0, 0.0)) -> "Polyline":
        ax, ay = about
        return Polyline(
            tuple((ax + factor * (x - ax), ay + factor * (y - ay)) for x, y in self.points),
            self.closed,
        )


class ArcWalk:
    """Arc-length parameterisation of a polyline (closing edge included)."""

    def __init__(self, line: Polyline):
        verts = list(line.points)
        if line.closed:
            verts.append(line.points[0])
        self.verts = verts
        self.cum = [0.0]
        for p, q in zip(verts, verts[1:]):
            self.cum.append(self.cum[-1] + dist(p, q))
        self.total = self.cum[-1]

    def _locate(self, s: float) -> tuple[int, float]:
        s = min(max(s, 0.0), self.total)
        i = bisect_right(self.cum, s) - 1
        i = min(i, len(self.verts) - 2)
        seg_len = self.cum[i + 1] - self.cum[i]
        t = 0.0 if seg_len <= 0.0 else (s - self.cum[i]) / seg_len
        return i, t

    def point_at(self, s: float) -> Point:
        i, t = self._locate(s)
        (x0, y0), (x1, y1) = self.verts[i], self.verts[i + 1]
        return (x0 + t * (x1 - x0), y0 + t * (y1 - y0))

    def tangent_at(self, s: float) -> float:
        i, _ = self._locate(s)
        (x0, y0), (x1, y1) = self.verts[i], self.verts[i + 1]
        return math.atan2(y1 - y0, x1 - x0)

    def sample(self, step: float) -> list[Point]:
        """Points every ``step`` mm of arc, endpoint included."""
        n = max(1, int(math.ceil(self.total / step)))
        return [self.point_at(self.total * k / n) for k in range(n + 1)]


def largest_remainder(weights: Sequence[float], k: int, minimum: int = 1) -> list[int]:
    """Apportion ``k`` integer counts proportionally to ``weights``.

    Largest-remainder rounding with a per-entry minimum. Ties go to the
    lower index; the minimum is restored by borrowing from the largest count.
    """
    m = len(weights)
    if k < minimum * m:
        raise InfeasiblePartitionError(
            f"cannot apportion {k} among {m} entries with minimum {minimum}"
        )
    total = float(sum(weights))
    if total <= 0.0:
        raise ValueError("weights must have positive sum")
    quotas = [k * w / total for w in weights]
    counts = [int(math.floor(q)) for q in quotas]
    leftover = k - sum(counts)
    order = sorted(range(m), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    # restore the minimum by taking from the largest count (lowest index on ties)
    for i in range(m):
        while counts[i] < minimum:
            donor = max(
                (j for j in range(m) if counts[j] > minimum),
                key=lambda j: (counts[j], -j),
            )
            counts[donor] -= 1
            counts[i] += 1
    return counts


def partition_to_segments(contours: Sequence[Polyline], k: int) -> list[Segment]:
    """Split contours into exactly ``k`` chords of equal arc-length spacing.

    ``k`` is apportioned across contours proportionally to perimeter
    (largest-remainder, at least one chord per contour); within a contour
    the chord endpoints sit at equal arc-length steps from its first vertex.
    A closed contour asked for a single chord yields the chord from its
    start to the half-perimeter point.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not contours:
        raise ValueError("no contours given")
    if k < len(contours):
        raise InfeasiblePartitionError(
            f"{len(contours)} contours cannot each receive a segment from k={k}"
        )
    perims = [c.perimeter for c in contours]
    counts = largest_remainder(perims, k)
    segments: list[Segment] = []
    for contour, ki in zip(contours, counts):
        walk = ArcWalk(contour)
        if contour.closed and ki == 1:
            segments.append(Segment(walk.point_at(0.0), walk.point_at(walk.total / 2.0)))
            continue
        pts = [walk.point_at(walk.total * j / ki) for j in range(ki + 1)]
        for p, q in zip(pts, pts[1:]):
            if dist(p, q) <= COINCIDENT_EPS:
                raise InfeasiblePartitionError(
                    f"degenerate chord at {p}; contour folds onto itself at this resolution"
                )
            segments.append(Segment(p, q))
    return segments


def partition_stations(contours: Sequence[Polyline], k: int) -> list[tuple[Point, float]]:
    """``k`` (point, tangent) stations at equal arc-length spacing.

    Closed contours place stations at the chord-partition vertices
    (j*L/k). Open contours include both endpoints (j*L/(k-1)); a single
    station on an open contour sits at the arc midpoint.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not contours:
        raise ValueError("no contours given")
    if k < len(contours):
        raise InfeasiblePartitionError(
            f"{len(contours)} contours cannot each receive a station from k={k}"
        )
    perims = [c.perimeter for c in contours]
    counts = largest_remainder(perims, k)
    stations: list[tuple[Point, float]] = []
    for contour, ki in zip(contours, counts):
        walk = ArcWalk(contour)
        if contour.closed:
            ss = [walk.total * j / ki for j in range(ki)]
        elif ki == 1:
            ss = [walk.total / 2.0]
        else:
            ss = [walk.total * j / (ki - 1) for j in range(ki)]
        for s in ss:
            stations.append((walk.point_at(s), wrap_angle(walk.tangent_at(s))))
    return stations


def fit_contours(
    contours: Sequence[Polyline],
    width: float,
    height: float,
    margin: float = 0.1,
) -> list[Polyline]:
    """Uniformly scale and translate contours to fit a width x height box.

    ``margin`` is the fraction of each box dimension kept clear on each side.
    """
    xs = [x for c in contours for x, _ in c.points]
    ys = [y for c in contours for _, y in c.points]
    minx, maxx, miny, maxy = min(xs), max(xs), min(ys), max(ys)
    spanx = max(maxx - minx, COINCIDENT_EPS)
    spany = max(maxy - miny, COINCIDENT_EPS)
    usable_w = width * (1.0 - 2.0 * margin)
    usable_h = height * (1.0 - 2.0 * margin)
    factor = min(usable_w / spanx, usable_h / spany)
    cx, cy = (minx + maxx) / 2.0, (miny + maxy) / 2.0
    out = []
    for c in contours:
        pts = tuple(
            (width / 2.0 + factor * (x - cx), height / 2.0 + factor * (y - cy))
            for x, y in c.points
        )
        out.append(Polyline(pts, c.closed))
    return out
