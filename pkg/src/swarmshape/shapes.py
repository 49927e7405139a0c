"""Shape compilation: turn drawn lines, SVG contours, parametric presets,
and data maps into per-robot target sets; keyframe sequencing; and the
coverage-error metric comparing rendered geometry to a reference contour.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .actuator import MAX_LENGTH, MIN_LENGTH, Mount
from .geometry import (
    ArcWalk,
    Point,
    Polyline,
    Pose,
    Segment,
    partition_stations,
    partition_to_segments,
    wrap_angle,
)


class FidelityWarning(UserWarning):
    """A compiled target set cannot represent the requested shape exactly."""


class NotReadyError(RuntimeError):
    """Coverage was requested before any robot reached its holding state."""


class TargetMode(str, Enum):
    LINE = "line"    # robots render chords with extended strips
    POINT = "point"  # robots render bare positions


@dataclass(frozen=True)
class TargetEntry:
    pose: Pose
    extension: float
    mount: Mount


@dataclass(frozen=True)
class TargetSet:
    entries: tuple[TargetEntry, ...]
    mode: TargetMode


@dataclass(frozen=True)
class AnimationPlan:
    frames: tuple[TargetSet, ...]
    hold_time: float

    def __post_init__(self):
        if not self.frames:
            raise ValueError("animation plan needs at least one frame")


# ---------------------------------------------------------------------------
# shape specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DrawnLines:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("drawn shape needs at least one segment")


@dataclass(frozen=True)
class SvgContour:
    contours: tuple[Polyline, ...]

    def __post_init__(self):
        if not self.contours:
            raise ValueError("contour shape needs at least one polyline")


@dataclass(frozen=True)
class SineWave:
    wavelength: float
    count: int
    amplitude: float = MAX_LENGTH  # crest extension length, mm
    origin: Point = (0.0, 0.0)

    def __post_init__(self):
        if self.amplitude <= 0.0:
            raise ValueError("amplitude must be positive")
        if not MIN_LENGTH <= self.amplitude <= MAX_LENGTH:
            raise ValueError(
                f"amplitude {self.amplitude} outside extension range [{MIN_LENGTH}, {MAX_LENGTH}]"
            )
        if self.wavelength <= 0.0:
            raise ValueError("wavelength must be positive")
        if self.count < 1:
            raise ValueError("count must be >= 1")


@dataclass(frozen=True)
class Rectangle:
    width: float
    height: float
    center: Point = (0.0, 0.0)

    def __post_init__(self):
        if self.width <= 0.0 or self.height <= 0.0:
            raise ValueError("rectangle sides must be positive")


@dataclass(frozen=True)
class Fence:
    center: Point
    radius: float
    count: int
    height: float

    def __post_init__(self):
        if self.radius <= 0.0 or self.height <= 0.0:
            raise ValueError("fence radius and height must be positive")
        if self.count < 1:
            raise ValueError("count must be >= 1")


@dataclass(frozen=True)
class DataMap:
    anchors: tuple[Point, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if not self.anchors or len(self.anchors) != len(self.values):
            raise ValueError("anchors and values must be equal-length and non-empty")
        if any(not math.isfinite(v) for v in self.values):
            raise ValueError("data values must be finite")


ShapeSpec = DrawnLines | SvgContour | SineWave | Rectangle | Fence | DataMap


# ---------------------------------------------------------------------------
# compilation
# ---------------------------------------------------------------------------


def _clamped_extension(length: float) -> float:
    clamped = min(max(length, MIN_LENGTH), MAX_LENGTH)
    if clamped != length:
        warnings.warn(
            f"segment length {length:.1f} mm clamped to extension {clamped:.1f} mm",
            FidelityWarning,
            stacklevel=3,
        )
    return clamped


def compile_line_mode(contours: Sequence[Polyline], n: int) -> TargetSet:
    """One chord per robot: target at the chord midpoint, heading along the
    chord, extension equal to the chord length (clamped into range)."""
    segments = partition_to_segments(contours, n)
    entries = tuple(
        TargetEntry(
            pose=Pose(seg.midpoint[0], seg.midpoint[1], seg.orientation),
            extension=_clamped_extension(seg.length),
            mount=Mount.HORIZONTAL,
        )
        for seg in segments
    )
    return TargetSet(entries=entries, mode=TargetMode.LINE)


def compile_point_mode(contours: Sequence[Polyline], n: int) -> TargetSet:
    """One arc-length station per robot; extensions stay at base length."""
    stations = partition_stations(contours, n)
    entries = tuple(
        TargetEntry(pose=Pose(p[0], p[1], tangent), extension=MIN_LENGTH, mount=Mount.HORIZONTAL)
        for p, tangent in stations
    )
    return TargetSet(entries=entries, mode=TargetMode.POINT)


def compile_drawn_lines(spec: DrawnLines, n: int) -> TargetSet:
    """Drawn strokes become two-point contours and are chorded across ``n``."""
    contours = [Polyline((seg.a, seg.b)) for seg in spec.segments]
    return compile_line_mode(contours, n)


def compile_sine_wave(spec: SineWave) -> TargetSet:
    """Robots evenly spaced over one wavelength; vertical extension follows
    the sine, base length at the trough and ``amplitude`` at the crest."""
    ox, oy = spec.origin
    n = spec.count
    entries = []
    for k in range(n):
        x = ox + (spec.wavelength * k / (n - 1) if n > 1 else 0.0)
        s = math.sin(2.0 * math.pi * (x - ox) / spec.wavelength)
        ext = MIN_LENGTH + (spec.amplitude - MIN_LENGTH) * (1.0 + s) / 2.0
        entries.append(TargetEntry(pose=Pose(x, oy, 0.0), extension=ext, mount=Mount.VERTICAL))
    return TargetSet(entries=tuple(entries), mode=TargetMode.POINT)


def compile_rectangle(spec: Rectangle) -> TargetSet:
    """Four line-mode edge targets: bottom, right, top, left (CCW)."""
    cx, cy = spec.center
    w2, h2 = spec.width / 2.0, spec.height / 2.0
    edges = [
        (Pose(cx, cy - h2, 0.0), spec.width),
        (Pose(cx + w2, cy, math.pi / 2.0), spec.height),
        (Pose(cx, cy + h2, math.pi), spec.width),
        (Pose(cx - w2, cy, -math.pi / 2.0), spec.height),
    ]
    entries = tuple(
        TargetEntry(pose=p, extension=_clamped_extension(length), mount=Mount.HORIZONTAL)
        for p, length in edges
    )
    return TargetSet(entries=entries, mode=TargetMode.LINE)


def compile_fence(spec: Fence) -> TargetSet:
    """Robots on a circle, headings tangent, vertical extensions at ``height``."""
    cx, cy = spec.center
    entries = []
    for k in range(spec.count):
        a = 2.0 * math.pi * k / spec.count
        pose = Pose(cx + spec.radius * math.cos(a), cy + spec.radius * math.sin(a),
                    wrap_angle(a + math.pi / 2.0))
        entries.append(
            TargetEntry(pose=pose, extension=_clamped_extension(spec.height), mount=Mount.VERTICAL)
        )
    return TargetSet(entries=tuple(entries), mode=TargetMode.POINT)


def data_to_heights(anchors: Sequence[Point], values: Sequence[float]) -> TargetSet:
    """Linear map from data values to vertical extensions over the full
    actuator range; an all-equal dataset flattens to base length."""
    spec = DataMap(tuple(anchors), tuple(values))
    lo, hi = min(spec.values), max(spec.values)
    span = hi - lo
    if span <= 0.0:
        warnings.warn("all data values equal; extensions flatten to base length", FidelityWarning)
    entries = []
    for (x, y), v in zip(spec.anchors, spec.values):
        ext = MIN_LENGTH if span <= 0.0 else MIN_LENGTH + (MAX_LENGTH - MIN_LENGTH) * (v - lo) / span
        entries.append(TargetEntry(pose=Pose(x, y, 0.0), extension=ext, mount=Mount.VERTICAL))
    return TargetSet(entries=tuple(entries), mode=TargetMode.POINT)


def compile_shape(spec: ShapeSpec, n: int, mode: TargetMode = TargetMode.LINE) -> TargetSet:
    """Compile any shape specification for ``n`` robots.

    Contour-like shapes honour ``mode``; parametric presets carry their own
    robot counts and rendering style.
    """
    if isinstance(spec, DrawnLines):
        if mode == TargetMode.POINT:
            contours = [Polyline((seg.a, seg.b)) for seg in spec.segments]
            return compile_point_mode(contours, n)
        return compile_drawn_lines(spec, n)
    if isinstance(spec, SvgContour):
        if mode == TargetMode.POINT:
            return compile_point_mode(spec.contours, n)
        return compile_line_mode(spec.contours, n)
    if isinstance(spec, SineWave):
        return compile_sine_wave(spec)
    if isinstance(spec, Rectangle):
        return compile_rectangle(spec)
    if isinstance(spec, Fence):
        return compile_fence(spec)
    if isinstance(spec, DataMap):
        return data_to_heights(spec.anchors, spec.values)
    raise TypeError(f"unknown shape spec {type(spec).__name__}")


def sequence_keyframes(
    frames: Sequence[ShapeSpec], n: int, hold: float, mode: TargetMode = TargetMode.LINE
) -> AnimationPlan:
    """Compile a frame sequence into an animation plan. The engine advances
    to the next frame once every robot has held the current one for
    ``hold`` seconds."""
    if not frames:
        raise ValueError("keyframe sequence needs at least one frame")
    compiled = []
    for idx, frame in enumerate(frames):
        try:
            compiled.append(compile_shape(frame, n, mode))
        except (ValueError, TypeError) as exc:
            raise ValueError(f"keyframe {idx} cannot be compiled: {exc}") from exc
    return AnimationPlan(frames=tuple(compiled), hold_time=hold)


# ---------------------------------------------------------------------------
# coverage error
# ---------------------------------------------------------------------------


def _sample_contours(contours: Sequence[Polyline], step: float) -> np.ndarray:
    pts: list[Point] = []
    for c in contours:
        pts.extend(ArcWalk(c).sample(step))
    return np.asarray(pts, dtype=float)


def _sample_rendered(
    rendered: Sequence[tuple[Pose, float, Mount]], mode: TargetMode, step: float
) -> np.ndarray:
    pts: list[Point] = []
    for pose, extension, mount in rendered:
        if mode == TargetMode.LINE and mount in (Mount.HORIZONTAL, Mount.CURVED):
            half = extension / 2.0
            ux, uy = math.cos(pose.theta), math.sin(pose.theta)
            k = max(1, int(math.ceil(extension / step)))
            for i in range(k + 1):
                t = -half + extension * i / k
                pts.append((pose.x + t * ux, pose.y + t * uy))
        else:
            pts.append(pose.position)
    return np.asarray(pts, dtype=float)


def coverage_error(
    rendered: Sequence[tuple[Pose, float, Mount]],
    reference: Sequence[Polyline],
    mode: TargetMode,
    step: float = 1.0,
) -> float:
    """Symmetric mean distance (mm) between rendered geometry and reference.

    Both sides are sampled at ``step`` mm arc spacing; the result is the
    mean of the two directed mean nearest-neighbour distances. ``rendered``
    carries (pose, extension, mount) for each robot that is displaying.
    """
    if not rendered:
        raise NotReadyError("no robots are holding a shape yet")
    if not reference:
        raise ValueError("no reference contours")
    ref = _sample_contours(reference, step)
    shown = _sample_rendered(rendered, mode, step)
    d_ref_to_shown = cKDTree(shown).query(ref)[0].mean()
    d_shown_to_ref = cKDTree(ref).query(shown)[0].mean()
    return float((d_ref_to_shown + d_shown_to_ref) / 2.0)
