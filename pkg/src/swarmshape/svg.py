"""SVG-subset parser that flattens drawable elements to polylines.

Supported: ``path`` (M m L l H h V v C c Q q Z z), ``polyline``,
``polygon``, ``rect``, ``line``. Curves are flattened by recursive
midpoint subdivision until the control net deviates from the chord by at
most the flatten tolerance, which bounds the curve-to-polyline distance
by the same amount. Arc path commands (A) and shorthand curves (S, T)
are rejected deliberately.
"""

from __future__ import annotations

import math
import re
import xml.etree.ElementTree as ET
from typing import Iterator

from .geometry import COINCIDENT_EPS, Point, Polyline

_TOKEN = re.compile(
    r"\s*,?\s*(?:([A-Za-z])|([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))"
)

_PARAM_COUNT = {"M": 2, "L": 2, "H": 1, "V": 1, "C": 6, "Q": 4, "Z": 0}
_UNSUPPORTED = {"A", "S", "T"}


class SvgParseError(ValueError):
    """Malformed SVG input. ``offset`` is the byte offset when known."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class UnsupportedSvgFeatureError(SvgParseError):
    """Well-formed SVG using a feature outside the supported subset."""

    def __init__(self, command: str):
        super().__init__(f"unsupported SVG path command {command!r}")
        self.command = command


def _byte_offset(text: str, line: int, column: int) -> int:
    lines = text.split("\n")
    chars = sum(len(l) + 1 for l in lines[: line - 1]) + column
    return len(text[:chars].encode("utf-8"))


def _point_chord_dist(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    d2 = dx * dx + dy * dy
    if d2 <= COINCIDENT_EPS:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / d2))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _flatten_cubic(p0, p1, p2, p3, tol, out, depth=0):
    flat = max(_point_chord_dist(p1, p0, p3), _point_chord_dist(p2, p0, p3)) <= tol
    if flat or depth >= 24:
        out.append(p3)
        return
    mid = lambda a, b: ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
    p01, p12, p23 = mid(p0, p1), mid(p1, p2), mid(p2, p3)
    p012, p123 = mid(p01, p12), mid(p12, p23)
    pm = mid(p012, p123)
    _flatten_cubic(p0, p01, p012, pm, tol, out, depth + 1)
    _flatten_cubic(pm, p123, p23, p3, tol, out, depth + 1)


def _flatten_quadratic(p0, p1, p2, tol, out):
    # exact degree elevation to cubic, then the shared flattener
    c1 = (p0[0] + 2.0 * (p1[0] - p0[0]) / 3.0, p0[1] + 2.0 * (p1[1] - p0[1]) / 3.0)
    c2 = (p2[0] + 2.0 * (p1[0] - p2[0]) / 3.0, p2[1] + 2.0 * (p1[1] - p2[1]) / 3.0)
    _flatten_cubic(p0, c1, c2, p2, tol, out)


def _tokenize_path(d: str) -> Iterator[str | float]:
    pos = 0
    while pos < len(d):
        m = _TOKEN.match(d, pos)
        if m is None:
            if d[pos:].strip() == "":
                return
            raise SvgParseError(f"bad path data near {d[pos:pos+16]!r}")
        if m.group(1):
            yield m.group(1)
        else:
            yield float(m.group(2))
        pos = m.end()


class _PathBuilder:
    def __init__(self, tol: float):
        self.tol = tol
        self.subpaths: list[tuple[list[Point], bool]] = []
        self.pts: list[Point] = []
        self.cur: Point = (0.0, 0.0)
        self.start: Point = (0.0, 0.0)

    def _flush(self, closed: bool):
        if len(self.pts) >= 2:
            self.subpaths.append((self.pts, closed))
        self.pts = []

    def move(self, p: Point):
        self._flush(False)
        self.cur = p
        self.start = p
        self.pts = [p]

    def line(self, p: Point):
        if not self.pts:
            self.pts = [self.cur]
        self.pts.append(p)
        self.cur = p

    def cubic(self, c1: Point, c2: Point, p: Point):
        if not self.pts:
            self.pts = [self.cur]
        _flatten_cubic(self.cur, c1, c2, p, self.tol, self.pts)
        self.cur = p

    def quadratic(self, c: Point, p: Point):
        if not self.pts:
            self.pts = [self.cur]
        _flatten_quadratic(self.cur, c, p, self.tol, self.pts)
        self.cur = p

    def close(self):
        self._flush(True)
        self.cur = self.start


def parse_path_data(d: str, tol: float) -> list[tuple[list[Point], bool]]:
    """Flatten one ``d`` attribute into (points, closed) subpaths."""
    tokens = list(_tokenize_path(d))
    b = _PathBuilder(tol)
    i = 0
    cmd: str | None = None
    while i < len(tokens):
        t = tokens[i]
        if isinstance(t, str):
            up = t.upper()
            if up in _UNSUPPORTED:
                raise UnsupportedSvgFeatureError(t)
            if up not in _PARAM_COUNT:
                raise SvgParseError(f"unknown path command {t!r}")
            cmd = t
            i += 1
            if up == "Z":
                b.close()
                cmd = None
                continue
        elif cmd is None:
            raise SvgParseError(f"number {t} outside any path command")
        up = cmd.upper()
        rel = cmd.islower()
        n = _PARAM_COUNT[up]
        args = tokens[i : i + n]
        if len(args) < n or any(isinstance(a, str) for a in args):
            raise SvgParseError(f"path command {cmd!r} needs {n} numbers")
        i += n
        ox, oy = b.cur if rel else (0.0, 0.0)
        if up == "M":
            b.move((ox + args[0], oy + args[1]))
            cmd = "l" if rel else "L"  # extra pairs are implicit line-tos
        elif up == "L":
            b.line((ox + args[0], oy + args[1]))
        elif up == "H":
            b.line((ox + args[0], b.cur[1]))
        elif up == "V":
            b.line((b.cur[0], oy + args[0]))
        elif up == "C":
            b.cubic(
                (ox + args[0], oy + args[1]),
                (ox + args[2], oy + args[3]),
                (ox + args[4], oy + args[5]),
            )
        elif up == "Q":
            b.quadratic((ox + args[0], oy + args[1]), (ox + args[2], oy + args[3]))
    b._flush(False)
    return b.subpaths


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_points_attr(text: str) -> list[Point]:
    nums = [float(v) for v in re.findall(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?", text)]
    if len(nums) < 4 or len(nums) % 2:
        raise SvgParseError(f"bad points list {text!r}")
    return list(zip(nums[::2], nums[1::2]))


def _float_attr(el: ET.Element, name: str, default: float | None = None) -> float:
    raw = el.get(name)
    if raw is None:
        if default is None:
            raise SvgParseError(f"<{_local_name(el.tag)}> missing attribute {name!r}")
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise SvgParseError(f"bad numeric attribute {name}={raw!r}") from exc


def _dedupe(points: list[Point]) -> list[Point]:
    out: list[Point] = []
    for p in points:
        if not out or math.hypot(p[0] - out[-1][0], p[1] - out[-1][1]) > COINCIDENT_EPS:
            out.append(p)
    return out


def parse_svg(
    document: str,
    *,
    scale: float = 1.0,
    flatten_tolerance: float = 1.0,
) -> list[Polyline]:
    """Parse an SVG document into polylines in millimeters.

    ``scale`` is the mm-per-user-unit factor applied to every coordinate.
    ``flatten_tolerance`` (mm, post-scale) bounds the distance between any
    curve point and the emitted polyline.
    """
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, col = exc.position
        off = _byte_offset(document, line, col)
        raise SvgParseError(f"malformed XML at byte {off}: {exc.msg}", offset=off) from exc

    tol_units = flatten_tolerance / scale if scale > 0 else flatten_tolerance
    raw: list[tuple[list[Point], bool]] = []
    for el in root.iter():
        tag = _local_name(el.tag)
        if tag == "path":
            raw.extend(parse_path_data(el.get("d", ""), tol_units))
        elif tag == "polyline":
            raw.append((_parse_points_attr(el.get("points", "")), False))
        elif tag == "polygon":
            raw.append((_parse_points_attr(el.get("points", "")), True))
        elif tag == "rect":
            x = _float_attr(el, "x", 0.0)
            y = _float_attr(el, "y", 0.0)
            w = _float_attr(el, "width")
            h = _float_attr(el, "height")
            if w <= 0 or h <= 0:
                raise SvgParseError(f"rect with non-positive size {w}x{h}")
            raw.append(([(x, y), (x + w, y), (x + w, y + h), (x, y + h)], True))
        elif tag == "line":
            raw.append(
                (
                    [
                        (_float_attr(el, "x1", 0.0), _float_attr(el, "y1", 0.0)),
                        (_float_attr(el, "x2", 0.0), _float_attr(el, "y2", 0.0)),
                    ],
                    False,
                )
            )

    polylines: list[Polyline] = []
    for pts, closed in raw:
        scaled = _dedupe([(x * scale, y * scale) for x, y in pts])
        if closed and len(scaled) > 2 and (
            math.hypot(scaled[0][0] - scaled[-1][0], scaled[0][1] - scaled[-1][1])
            <= COINCIDENT_EPS
        ):
            scaled = scaled[:-1]
        if len(scaled) >= 2:
            polylines.append(Polyline(tuple(scaled), closed))
    if not polylines:
        raise SvgParseError("document contains no drawable geometry")
    return polylines
