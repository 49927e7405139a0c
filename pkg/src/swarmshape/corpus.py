"""Built-in contour corpus for the line-vs-point rendering comparison.

Three multi-contour shapes sized for the default world. Contours are
smooth (cubic paths through lobed radial profiles) and their combined
perimeters keep chord targets physically separable even at 60 robots.
"""

from __future__ import annotations

import math

from .geometry import Point


def _lobed_points(cx, cy, rx, ry, lobes, depth, phase=0.0, n=48) -> list[Point]:
    pts = []
    for k in range(n):
        a = 2.0 * math.pi * k / n
        r = 1.0 + depth * math.sin(lobes * a + phase)
        pts.append((cx + rx * r * math.cos(a), cy + ry * r * math.sin(a)))
    return pts


def _wave_points(x0, x1, cy, amplitude, periods, phase=0.0, n=64) -> list[Point]:
    pts = []
    for k in range(n + 1):
        t = k / n
        x = x0 + (x1 - x0) * t
        y = cy + amplitude * math.sin(2.0 * math.pi * periods * t + phase)
        pts.append((x, y))
    return pts


def _catmull_rom_path(points: list[Point], closed: bool) -> str:
    """Cubic path through the given points (uniform Catmull-Rom tangents)."""
    n = len(points)
    if closed:
        idx = lambda i: points[i % n]
    else:
        idx = lambda i: points[max(0, min(n - 1, i))]
    count = n if closed else n - 1
    parts = [f"M{points[0][0]:.3f} {points[0][1]:.3f}"]
    for i in range(count):
        p0, p1, p2, p3 = idx(i - 1), idx(i), idx(i + 1), idx(i + 2)
        c1 = (p1[0] + (p2[0] - p0[0]) / 6.0, p1[1] + (p2[1] - p0[1]) / 6.0)
        c2 = (p2[0] - (p3[0] - p1[0]) / 6.0, p2[1] - (p3[1] - p1[1]) / 6.0)
        parts.append(
            f"C {c1[0]:.3f} {c1[1]:.3f}, {c2[0]:.3f} {c2[1]:.3f}, {p2[0]:.3f} {p2[1]:.3f}"
        )
    if closed:
        parts.append("Z")
    return " ".join(parts)


def _svg(paths: list[str]) -> str:
    body = "\n".join(f'  <path d="{d}" fill="none" stroke="black"/>' for d in paths)
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" width="1150" height="740" '
        'viewBox="0 0 1150 740">\n' + body + "\n</svg>\n"
    )


def serpentine_svg() -> str:
    """Four horizontal passes joined by semicircular turns; one open stroke."""
    y_rows = [130.0, 290.0, 450.0, 610.0]
    x_lo, x_hi = 140.0, 1010.0
    r = (y_rows[1] - y_rows[0]) / 2.0
    pts: list[Point] = []
    for i, y in enumerate(y_rows):
        leftward = i % 2 == 1
        xs = [x_hi, x_lo] if leftward else [x_lo, x_hi]
        for k in range(13):
            t = k / 12.0
            pts.append((xs[0] + (xs[1] - xs[0]) * t, y))
        if i < len(y_rows) - 1:
            # semicircular turn to the next row
            cx = x_lo if leftward else x_hi
            cy = y + r
            for k in range(1, 8):
                a = -math.pi / 2.0 + math.pi * k / 8.0
                sx = -1.0 if leftward else 1.0
                pts.append((cx + sx * r * math.cos(a), cy + r * math.sin(a)))
    return _svg([_catmull_rom_path(pts, closed=False)])


def double_ring_svg() -> str:
    """A gently lobed ring nested inside a larger one."""
    outer = _lobed_points(575, 370, 462, 295, 6, 0.06, phase=0.2, n=64)
    inner = _lobed_points(575, 370, 300, 195, 6, 0.05, phase=0.2 + math.pi / 6, n=48)
    return _svg(
        [
            _catmull_rom_path(outer, closed=True),
            _catmull_rom_path(inner, closed=True),
        ]
    )


def bloom_svg() -> str:
    """A three-lobed bloom outline with a lobed inner ring."""
    outer = _lobed_points(575, 370, 430, 300, 3, 0.08, phase=0.7, n=56)
    inner = _lobed_points(575, 370, 285, 200, 3, 0.06, phase=0.7 + math.pi / 3, n=40)
    return _svg(
        [
            _catmull_rom_path(outer, closed=True),
            _catmull_rom_path(inner, closed=True),
        ]
    )


CORPUS = {
    "serpentine": serpentine_svg,
    "double-ring": double_ring_svg,
    "bloom": bloom_svg,
}


def corpus_names() -> list[str]:
    return list(CORPUS)


def corpus_svg(name: str) -> str:
    try:
        return CORPUS[name]()
    except KeyError:
        raise KeyError(f"unknown corpus shape {name!r}; available: {', '.join(CORPUS)}")
