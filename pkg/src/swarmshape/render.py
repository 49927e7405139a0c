"""Vector rendering of world snapshots.

Robots draw as oriented squares; horizontal extensions as strips through
the body, vertical extensions as height-shaded discs with labels,
volumetric/areal mounts as translucent circles. A reference contour can
be overlaid for visual comparison. Output is plain SVG text.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

from .actuator import MAX_LENGTH, MIN_LENGTH, Mount
from .geometry import Polyline

BODY_SIDE = 36.0


def _height_color(extension: float) -> str:
    t = (extension - MIN_LENGTH) / (MAX_LENGTH - MIN_LENGTH)
    t = min(max(t, 0.0), 1.0)
    r = int(40 + 30 * t)
    g = int(90 + 60 * (1 - t))
    b = int(140 + 100 * t)
    return f"rgb({r},{g},{b})"


def render_svg(
    snapshot: dict,
    reference: Sequence[Polyline] | None = None,
    world: tuple[float, float] = (1150.0, 740.0),
) -> str:
    """Render a snapshot dict (see Simulation.snapshot) to SVG text."""
    w, h = world
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}" '
        f'viewBox="0 0 {w:.0f} {h:.0f}">',
        f'<rect x="0" y="0" width="{w:.0f}" height="{h:.0f}" fill="#fbfbf8" stroke="#444"/>',
    ]
    for gx in range(100, int(w), 100):
        parts.append(
            f'<line x1="{gx}" y1="0" x2="{gx}" y2="{h:.0f}" stroke="#eee" stroke-width="1"/>'
        )
    for gy in range(100, int(h), 100):
        parts.append(
            f'<line x1="0" y1="{gy}" x2="{w:.0f}" y2="{gy}" stroke="#eee" stroke-width="1"/>'
        )
    if reference:
        for contour in reference:
            pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in contour.points)
            tag = "polygon" if contour.closed else "polyline"
            parts.append(
                f'<{tag} points="{pts}" fill="none" stroke="#c7c7c7" '
                'stroke-width="2" stroke-dasharray="6 4"/>'
            )
    for obj in snapshot.get("objects", []):
        color = "#e8a33d" if obj["pushable"] else "#6b5b4a"
        parts.append(
            f'<circle cx="{obj["x"]:.2f}" cy="{obj["y"]:.2f}" r="{obj["radius"]:.2f}" '
            f'fill="{color}" fill-opacity="0.8"/>'
        )
    for robot in snapshot.get("robots", []):
        x, y = robot["x"], robot["y"]
        theta_deg = math.degrees(robot["theta"])
        mount = robot.get("mount", "horizontal")
        ext = robot.get("extension", MIN_LENGTH)
        if mount in (Mount.HORIZONTAL.value, Mount.CURVED.value) and ext > MIN_LENGTH + 1e-6:
            ux, uy = math.cos(robot["theta"]), math.sin(robot["theta"])
            half = ext / 2.0
            parts.append(
                f'<line x1="{x - half * ux:.2f}" y1="{y - half * uy:.2f}" '
                f'x2="{x + half * ux:.2f}" y2="{y + half * uy:.2f}" '
                'stroke="#1f77b4" stroke-width="6" stroke-linecap="round"/>'
            )
        elif mount in (Mount.VOLUMETRIC.value, Mount.AREAL.value):
            parts.append(
                f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{ext:.2f}" '
                'fill="#1f77b4" fill-opacity="0.25" stroke="#1f77b4"/>'
            )
        body_fill = "#d9d9d9"
        if mount == Mount.VERTICAL.value:
            body_fill = _height_color(ext)
        parts.append(
            f'<g transform="translate({x:.2f} {y:.2f}) rotate({theta_deg:.1f})">'
            f'<rect x="{-BODY_SIDE / 2:.1f}" y="{-BODY_SIDE / 2:.1f}" '
            f'width="{BODY_SIDE:.1f}" height="{BODY_SIDE:.1f}" '
            f'fill="{body_fill}" stroke="#333" stroke-width="1.5"/>'
            f'<line x1="0" y1="0" x2="{BODY_SIDE / 2:.1f}" y2="0" stroke="#333" stroke-width="2"/>'
            "</g>"
        )
        if mount == Mount.VERTICAL.value:
            parts.append(
                f'<text x="{x:.2f}" y="{y - 24:.2f}" font-size="13" text-anchor="middle" '
                f'fill="#333">{ext:.0f}</text>'
            )
    parts.append(
        f'<text x="8" y="{h - 8:.0f}" font-size="14" fill="#666">'
        f't = {snapshot.get("time", 0.0):.2f} s</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_frame(
    snapshot: dict,
    out_path: str | Path,
    reference: Sequence[Polyline] | None = None,
    world: tuple[float, float] = (1150.0, 740.0),
) -> Path:
    """Write a snapshot rendering to ``out_path``; returns the path."""
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(render_svg(snapshot, reference=reference, world=world), encoding="utf-8")
    return out
