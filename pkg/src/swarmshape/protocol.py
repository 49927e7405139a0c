"""Wire protocol (version 1) between the simulation service and clients.

JSON messages over a full-duplex channel, discriminated by ``type`` and
carrying a ``v: 1`` version field. Every inbound message is validated
before it touches the simulation; the JSON schema for both directions is
exported for clients to test against.
"""

from __future__ import annotations

from typing import Annotated, Any, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

from .scenario import ScenarioDoc, ShapeModel


class _Msg(BaseModel):
    model_config = ConfigDict(extra="forbid")
    v: Literal[1] = 1


# -- client -> server ----------------------------------------------------------


class LoadScenario(_Msg):
    type: Literal["load_scenario"]
    document: ScenarioDoc


class SetShape(_Msg):
    type: Literal["set_shape"]
    shape: ShapeModel
    mode: Literal["line", "point"] = "line"


class UploadSvg(_Msg):
    type: Literal["upload_svg"]
    svg: str
    scale: float = 1.0
    fit: bool = True
    mode: Literal["line", "point"] = "line"


class SetKeyframes(_Msg):
    type: Literal["set_keyframes"]
    frames: list[ShapeModel] = Field(min_length=1)
    hold: float = 2.0
    mode: Literal["line", "point"] = "line"


class DragRobot(_Msg):
    type: Literal["drag_robot"]
    id: int
    x: float
    y: float
    theta: float = 0.0


class PlaceRobot(_Msg):
    type: Literal["place_robot"]
    x: float
    y: float
    theta: float = 0.0


class RemoveRobot(_Msg):
    type: Literal["remove_robot"]
    id: int


class Play(_Msg):
    type: Literal["play"]


class Pause(_Msg):
    type: Literal["pause"]


class StepOnce(_Msg):
    type: Literal["step_once"]
    count: int = Field(default=1, ge=1, le=1_000_000)


class SetParams(_Msg):
    type: Literal["set_params"]
    params: dict[str, Any]


class RequestMetrics(_Msg):
    type: Literal["request_metrics"]


ClientMessage = Annotated[
    Union[
        LoadScenario,
        SetShape,
        UploadSvg,
        SetKeyframes,
        DragRobot,
        PlaceRobot,
        RemoveRobot,
        Play,
        Pause,
        StepOnce,
        SetParams,
        RequestMetrics,
    ],
    Field(discriminator="type"),
]

client_adapter: TypeAdapter = TypeAdapter(ClientMessage)


# -- server -> client ----------------------------------------------------------


class RobotView(BaseModel):
    id: int
    x: float
    y: float
    theta: float
    phase: str
    extension: float
    mount: str
    goal: dict[str, float] | None = None


class ObjectView(BaseModel):
    x: float
    y: float
    radius: float
    pushable: bool


class Snapshot(_Msg):
    type: Literal["snapshot"] = "snapshot"
    time: float
    playing: bool = False
    completed: bool = False
    robots: list[RobotView] = Field(default_factory=list)
    objects: list[ObjectView] = Field(default_factory=list)
    phase_counts: dict[str, int] = Field(default_factory=dict)


class Event(_Msg):
    type: Literal["event"] = "event"
    time: float
    kind: str
    robot_id: int | None = None
    text: str = ""


class MetricsMessage(_Msg):
    type: Literal["metrics"] = "metrics"
    metrics: dict[str, Any]


class ErrorMessage(_Msg):
    type: Literal["error"] = "error"
    code: str
    text: str


ServerMessage = Annotated[
    Union[Snapshot, Event, MetricsMessage, ErrorMessage],
    Field(discriminator="type"),
]

server_adapter: TypeAdapter = TypeAdapter(ServerMessage)


def parse_client_message(raw: bytes | str | dict) -> ClientMessage:
    if isinstance(raw, dict):
        return client_adapter.validate_python(raw)
    return client_adapter.validate_json(raw)


def protocol_schema() -> dict:
    """JSON schema for both message directions, for client conformance tests."""
    return {
        "version": 1,
        "client": client_adapter.json_schema(),
        "server": server_adapter.json_schema(),
    }
