"""Scenario documents: JSON descriptions of a world (robots, objects), a
shape or keyframe sequence, parameter overrides, and a seed. Documents are
schema-validated; validation failures carry the offending field path.
"""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .engine import RobotState, ScenarioError, SimObject, SimParams, Simulation
from .geometry import Pose, Segment, fit_contours
from .shapes import (
    DataMap,
    DrawnLines,
    Fence,
    Rectangle,
    ShapeSpec,
    SineWave,
    SvgContour,
    TargetMode,
)
from .svg import parse_svg


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SvgShapeModel(_Model):
    kind: Literal["svg"] = "svg"
    text: str | None = None
    path: str | None = None
    scale: float = 1.0
    fit: bool = False  # uniformly fit into the world with a margin


class DrawnLinesModel(_Model):
    kind: Literal["drawn_lines"] = "drawn_lines"
    segments: list[tuple[float, float, float, float]] = Field(min_length=1)


class SineWaveModel(_Model):
    kind: Literal["sine_wave"] = "sine_wave"
    wavelength: float
    count: int
    amplitude: float = 200.0
    origin: tuple[float, float] = (0.0, 0.0)


class RectangleModel(_Model):
    kind: Literal["rectangle"] = "rectangle"
    width: float
    height: float
    center: tuple[float, float] = (0.0, 0.0)


class FenceModel(_Model):
    kind: Literal["fence"] = "fence"
    center: tuple[float, float]
    radius: float
    count: int
    height: float


class DataMapModel(_Model):
    kind: Literal["data_map"] = "data_map"
    anchors: list[tuple[float, float]] = Field(min_length=1)
    values: list[float] = Field(min_length=1)


ShapeModel = Annotated[
    Union[SvgShapeModel, DrawnLinesModel, SineWaveModel, RectangleModel, FenceModel, DataMapModel],
    Field(discriminator="kind"),
]


class KeyframesModel(_Model):
    frames: list[ShapeModel] = Field(min_length=1)
    hold: float = 2.0


class RobotsModel(_Model):
    count: int | None = Field(default=None, ge=0)
    poses: list[tuple[float, float, float]] | None = None
    layout: Literal["grid", "spread"] = "grid"
    spacing: float = 80.0  # grid layout pitch


class ObjectModel(_Model):
    center: tuple[float, float]
    radius: float = Field(gt=0.0)
    pushable: bool = True


class ScenarioDoc(_Model):
    name: str
    seed: int = 0
    robots: RobotsModel
    mode: Literal["line", "point"] = "line"
    shape: ShapeModel | None = None
    keyframes: KeyframesModel | None = None
    objects: list[ObjectModel] = Field(default_factory=list)
    params: dict[str, float | int | bool] = Field(default_factory=dict)
    max_time: float | None = None


_PARAM_FIELDS = {f.name for f in dataclasses.fields(SimParams)}


def load_scenario(source: str | Path | dict) -> ScenarioDoc:
    """Load and validate a scenario from a path, JSON text, or dict."""
    if isinstance(source, dict):
        raw = source
    else:
        path = Path(source)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: not valid JSON: {exc}") from exc
    try:
        return ScenarioDoc.model_validate(raw)
    except ValidationError as exc:
        lines = [
            ".".join(str(p) for p in err["loc"]) + ": " + err["msg"] for err in exc.errors()
        ]
        raise ScenarioError("invalid scenario: " + "; ".join(lines)) from exc


def shape_from_model(model, params: SimParams, base_dir: Path | None = None) -> ShapeSpec:
    """Turn a validated shape description into a compilable specification."""
    if isinstance(model, SvgShapeModel):
        if model.text is None and model.path is None:
            raise ScenarioError("shape.svg: one of 'text' or 'path' is required")
        text = model.text
        if text is None:
            p = Path(model.path)
            if base_dir is not None and not p.is_absolute():
                p = base_dir / p
            if not p.exists():
                raise FileNotFoundError(f"SVG file not found: {p}")
            text = p.read_text(encoding="utf-8")
        contours = parse_svg(text, scale=model.scale)
        if model.fit:
            contours = fit_contours(contours, params.world_width, params.world_height, margin=0.12)
        return SvgContour(tuple(contours))
    if isinstance(model, DrawnLinesModel):
        return DrawnLines(
            tuple(Segment((x1, y1), (x2, y2)) for x1, y1, x2, y2 in model.segments)
        )
    if isinstance(model, SineWaveModel):
        return SineWave(
            wavelength=model.wavelength,
            count=model.count,
            amplitude=model.amplitude,
            origin=model.origin,
        )
    if isinstance(model, RectangleModel):
        return Rectangle(width=model.width, height=model.height, center=model.center)
    if isinstance(model, FenceModel):
        return Fence(
            center=model.center, radius=model.radius, count=model.count, height=model.height
        )
    if isinstance(model, DataMapModel):
        if len(model.anchors) != len(model.values):
            raise ScenarioError("shape.data_map: anchors and values must be equal length")
        return DataMap(tuple(model.anchors), tuple(model.values))
    raise ScenarioError(f"unknown shape kind {model!r}")


def grid_poses(count: int, params: SimParams, spacing: float = 80.0) -> list[Pose]:
    """Deterministic bottom-left grid layout with a wall margin."""
    margin = 60.0
    usable_w = params.world_width - 2 * margin
    cols = max(1, int(usable_w // spacing) + 1)
    poses = []
    for i in range(count):
        row, col = divmod(i, cols)
        x = margin + col * spacing
        y = margin + row * spacing
        if y > params.world_height - margin:
            raise ScenarioError(
                f"grid layout cannot place {count} robots at spacing {spacing}"
            )
        poses.append(Pose(x, y, 0.0))
    return poses


def spread_poses(count: int, params: SimParams) -> list[Pose]:
    """Deterministic grid stretched over the whole usable area, so robots
    start interleaved with wherever their goals will land."""
    margin = 60.0
    w = params.world_width - 2 * margin
    h = params.world_height - 2 * margin
    rows = max(1, round(math.sqrt(count * h / w)))
    cols = max(1, math.ceil(count / rows))
    while rows * cols < count:
        cols += 1
    poses = []
    for i in range(count):
        row, col = divmod(i, cols)
        x = margin + (w * col / (cols - 1) if cols > 1 else w / 2.0)
        y = margin + (h * row / (rows - 1) if rows > 1 else h / 2.0)
        poses.append(Pose(x, y, 0.0))
    return poses


def build_params(doc: ScenarioDoc, overrides: dict | None = None) -> SimParams:
    merged: dict = {"seed": doc.seed}
    for key, value in doc.params.items():
        if key not in _PARAM_FIELDS:
            raise ScenarioError(f"params.{key}: unknown simulation parameter")
        merged[key] = value
    if doc.max_time is not None:
        merged["max_sim_time"] = doc.max_time
    if overrides:
        for key, value in overrides.items():
            if key not in _PARAM_FIELDS:
                raise ScenarioError(f"override {key}: unknown simulation parameter")
            merged[key] = value
    try:
        return SimParams(**merged)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"invalid parameters: {exc}") from exc


def build_simulation(
    source: str | Path | dict | ScenarioDoc,
    overrides: dict | None = None,
    collect_log: bool = False,
    base_dir: Path | None = None,
) -> Simulation:
    """Validate a scenario and construct the ready-to-run world."""
    if isinstance(source, ScenarioDoc):
        doc = source
    else:
        doc = load_scenario(source)
        if base_dir is None and isinstance(source, (str, Path)) and not isinstance(source, dict):
            base_dir = Path(source).parent
    params = build_params(doc, overrides)

    if doc.robots.poses is not None:
        poses = [Pose(x, y, theta) for x, y, theta in doc.robots.poses]
        if doc.robots.count is not None and doc.robots.count != len(poses):
            raise ScenarioError("robots.count disagrees with robots.poses length")
    else:
        if doc.robots.count is None:
            raise ScenarioError("robots: either count or poses is required")
        if doc.robots.layout == "spread":
            poses = spread_poses(doc.robots.count, params)
        else:
            poses = grid_poses(doc.robots.count, params, doc.robots.spacing)
    if not poses:
        raise ScenarioError("scenario must define at least one robot")

    robots = [RobotState(id=i, pose=pose) for i, pose in enumerate(poses)]
    objects = [
        SimObject(center=o.center, radius=o.radius, pushable=o.pushable) for o in doc.objects
    ]
    try:
        sim = Simulation(params, robots, objects=objects, collect_log=collect_log)
    except ScenarioError:
        raise
    mode = TargetMode(doc.mode)
    if doc.keyframes is not None:
        frames = [shape_from_model(f, params, base_dir) for f in doc.keyframes.frames]
        sim.set_keyframes(frames, doc.keyframes.hold, mode)
    elif doc.shape is not None:
        sim.set_shape(shape_from_model(doc.shape, params, base_dir), mode)
    return sim


def scenario_json_schema() -> dict:
    return ScenarioDoc.model_json_schema()
