"""Live simulation service.

One task owns the simulation; websocket sessions enqueue validated
messages and the owner applies them strictly between physics ticks, so
client commands never interleave within a control tick. Snapshots stream
at up to 30 per second with conflation: a slow client always receives
the newest state, never a backlog. Duplicate snapshots while paused are
suppressed.

Endpoints: ``GET /state`` (latest snapshot), ``POST /scenario`` (load a
scenario document), ``GET /schema`` (wire protocol schema), ``GET /``
(UI assets when built), ``WS /ws`` (the message channel).
"""

from __future__ import annotations

import asyncio
import dataclasses
import json
import time as _time
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import ValidationError

from . import protocol
from .engine import ScenarioError, SimParams, Simulation
from .geometry import Pose
from .scenario import ScenarioDoc, build_simulation, shape_from_model
from .shapes import TargetMode

SNAPSHOT_HZ = 30.0
_MUTABLE_PARAM_BLOCKLIST = {"dt_physics", "dt_control", "seed"}

_FALLBACK_PAGE = """<!doctype html>
<html><head><title>swarmshape</title></head>
<body style="font-family: sans-serif">
<h3>swarmshape simulation server</h3>
<p>No UI bundle found. Build the frontend (see frontend/README.md) or use
<code>GET /state</code>, <code>POST /scenario</code> and the websocket at
<code>/ws</code>.</p>
</body></html>
"""


class _ClientChannel:
    """Outbound lane for one client: reliable messages (events, errors,
    metrics) are queued in order; snapshots conflate to the newest only."""

    def __init__(self):
        self.reliable: list[dict] = []
        self.snapshot: dict | None = None
        self.wake = asyncio.Event()

    def offer_reliable(self, message: dict) -> None:
        self.reliable.append(message)
        self.wake.set()

    def offer_snapshot(self, message: dict) -> None:
        self.snapshot = message
        self.wake.set()

    async def next(self) -> dict:
        while True:
            if self.reliable:
                return self.reliable.pop(0)
            if self.snapshot is not None:
                snap = self.snapshot
                self.snapshot = None
                return snap
            self.wake.clear()
            await self.wake.wait()


class SimServer:
    """Owns one simulation and serialises all access to it."""

    def __init__(self, sim: Simulation):
        self.sim = sim
        self.playing = False
        self.inbox: asyncio.Queue = asyncio.Queue()
        self.clients: dict[object, _ClientChannel] = {}
        self._last_sent_snapshot: str | None = None
        self._event_cursor = len(sim.events)
        self._input_cursor = len(sim.input_events)
        self._wall_anchor: float | None = None
        self._task: asyncio.Task | None = None

    # -- lifecycle ------------------------------------------------------------

    async def start(self) -> None:
        self._task = asyncio.create_task(self._run())

    async def stop(self) -> None:
        if self._task is not None:
            self._task.cancel()
            try:
                await self._task
            except asyncio.CancelledError:
                pass

    # -- client registry --------------------------------------------------------

    def attach(self, client) -> _ClientChannel:
        channel = _ClientChannel()
        self.clients[client] = channel
        channel.offer_snapshot(self._snapshot_message())  # sync-on-join
        return channel

    def detach(self, client) -> None:
        self.clients.pop(client, None)

    # -- main loop ----------------------------------------------------------------

    async def _run(self) -> None:
        period = 1.0 / SNAPSHOT_HZ
        while True:
            try:
                item = await asyncio.wait_for(self.inbox.get(), timeout=period)
            except asyncio.TimeoutError:
                item = None
            while item is not None:
                reply_to, message = item
                for out in self.handle(message):
                    channel = self.clients.get(reply_to)
                    if channel is None:
                        continue
                    if out.get("type") == "snapshot":
                        channel.offer_snapshot(out)
                    else:
                        channel.offer_reliable(out)
                item = None if self.inbox.empty() else self.inbox.get_nowait()
            if self.playing:
                self._advance_to_wall_clock()
            self._publish()

    def _advance_to_wall_clock(self) -> None:
        now = _time.monotonic()
        if self._wall_anchor is None:
            self._wall_anchor = now - self.sim.time
        target = now - self._wall_anchor
        # bounded burst keeps the loop responsive if we fall behind
        target = min(target, self.sim.time + 0.25)
        while self.sim.time < target:
            self.sim.step()

    def _publish(self) -> None:
        events = self._drain_events()
        for channel in self.clients.values():
            for event in events:
                channel.offer_reliable(event)
        snap = self._snapshot_message()
        encoded = json.dumps(snap, sort_keys=True)
        if encoded != self._last_sent_snapshot:
            self._last_sent_snapshot = encoded
            for channel in self.clients.values():
                channel.offer_snapshot(snap)

    def _drain_events(self) -> list[dict]:
        out = []
        for t, kind, text in self.sim.events[self._event_cursor:]:
            if kind == "input":
                continue  # the structured user-input event below carries it
            out.append({"v": 1, "type": "event", "time": t, "kind": kind, "text": text})
        self._event_cursor = len(self.sim.events)
        for ev in self.sim.input_events[self._input_cursor:]:
            out.append(
                {
                    "v": 1,
                    "type": "event",
                    "time": ev.time,
                    "kind": ev.kind.value,
                    "robot_id": ev.robot_id,
                    "text": f"{ev.kind.value} robot {ev.robot_id}",
                }
            )
        self._input_cursor = len(self.sim.input_events)
        return out

    def _snapshot_message(self) -> dict:
        snap = self.sim.snapshot()
        snap["type"] = "snapshot"
        snap["playing"] = self.playing
        return snap

    # -- message handling -------------------------------------------------------------

    def handle(self, message: protocol.ClientMessage | dict | str | bytes) -> list[dict]:
        """Apply one client message; returns direct replies for the sender.

        Messages either apply fully or are rejected with an error reply;
        broadcastable consequences (snapshots, events) go out via the
        streaming path.
        """
        try:
            if not isinstance(
                message,
                (
                    protocol.LoadScenario, protocol.SetShape, protocol.UploadSvg,
                    protocol.SetKeyframes, protocol.DragRobot, protocol.PlaceRobot,
                    protocol.RemoveRobot, protocol.Play, protocol.Pause,
                    protocol.StepOnce, protocol.SetParams, protocol.RequestMetrics,
                ),
            ):
                message = protocol.parse_client_message(message)
        except ValidationError as exc:
            return [_error("bad_message", _summarize_validation(exc))]
        try:
            return self._apply(message)
        except (ScenarioError, ValueError, KeyError) as exc:
            return [_error("rejected", str(exc))]

    def _apply(self, m) -> list[dict]:
        sim = self.sim
        if isinstance(m, protocol.LoadScenario):
            self.sim = build_simulation(m.document)
            self.playing = False
            self._wall_anchor = None
            self._event_cursor = len(self.sim.events)
            self._input_cursor = len(self.sim.input_events)
            self._last_sent_snapshot = None
            return [self._snapshot_message()]
        if isinstance(m, protocol.SetShape):
            spec = shape_from_model(m.shape, sim.params)
            sim.set_shape(spec, TargetMode(m.mode))
            return [self._snapshot_message()]
        if isinstance(m, protocol.UploadSvg):
            from .scenario import SvgShapeModel

            model = SvgShapeModel(kind="svg", text=m.svg, scale=m.scale, fit=m.fit)
            spec = shape_from_model(model, sim.params)
            sim.set_shape(spec, TargetMode(m.mode))
            return [self._snapshot_message()]
        if isinstance(m, protocol.SetKeyframes):
            frames = [shape_from_model(f, sim.params) for f in m.frames]
            sim.set_keyframes(frames, m.hold, TargetMode(m.mode))
            return [self._snapshot_message()]
        if isinstance(m, protocol.DragRobot):
            sim.drag_robot(m.id, Pose(m.x, m.y, m.theta))
            return [self._snapshot_message()]
        if isinstance(m, protocol.PlaceRobot):
            sim.place_robot(Pose(m.x, m.y, m.theta))
            return [self._snapshot_message()]
        if isinstance(m, protocol.RemoveRobot):
            sim.remove_robot(m.id)
            return [self._snapshot_message()]
        if isinstance(m, protocol.Play):
            self.playing = True
            self._wall_anchor = None
            return [self._snapshot_message()]
        if isinstance(m, protocol.Pause):
            self.playing = False
            return [self._snapshot_message()]
        if isinstance(m, protocol.StepOnce):
            for _ in range(m.count):
                sim.step()
            return [self._snapshot_message()]
        if isinstance(m, protocol.SetParams):
            blocked = _MUTABLE_PARAM_BLOCKLIST & set(m.params)
            if blocked:
                raise ScenarioError(
                    f"parameters {sorted(blocked)} cannot change mid-run"
                )
            valid = {f.name for f in dataclasses.fields(SimParams)}
            unknown = set(m.params) - valid
            if unknown:
                raise ScenarioError(f"unknown parameters {sorted(unknown)}")
            sim.params = dataclasses.replace(sim.params, **m.params)
            return [self._snapshot_message()]
        if isinstance(m, protocol.RequestMetrics):
            return [
                {"v": 1, "type": "metrics", "metrics": sim.metrics().to_dict()},
                self._snapshot_message(),
            ]
        raise ScenarioError(f"unhandled message {type(m).__name__}")


def _error(code: str, text: str) -> dict:
    return {"v": 1, "type": "error", "code": code, "text": text}


def _summarize_validation(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors()[:4]:
        loc = ".".join(str(p) for p in err["loc"])
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def create_app(
    sim: Simulation | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service around an existing simulation (or an empty world)."""
    if sim is None:
        sim = build_simulation(
            {"name": "empty", "robots": {"count": 6, "layout": "spread"}}
        )
    server = SimServer(sim)

    @asynccontextmanager
    async def lifespan(_app):
        await server.start()
        try:
            yield
        finally:
            await server.stop()

    app = FastAPI(title="swarmshape", version="1", lifespan=lifespan)
    app.state.server = server

    @app.get("/state")
    async def get_state():
        return JSONResponse(server._snapshot_message())

    @app.get("/schema")
    async def get_schema():
        return JSONResponse(protocol.protocol_schema())

    @app.post("/scenario")
    async def post_scenario(doc: ScenarioDoc):
        replies = server.handle(protocol.LoadScenario(type="load_scenario", document=doc))
        if replies and replies[0].get("type") == "error":
            return JSONResponse(replies[0], status_code=422)
        return JSONResponse({"ok": True, "snapshot": replies[0] if replies else None})

    @app.websocket("/ws")
    async def websocket_endpoint(ws: WebSocket):
        await ws.accept()
        channel = server.attach(ws)

        async def pump_out():
            while True:
                message = await channel.next()
                await ws.send_text(json.dumps(message, sort_keys=True))

        sender = asyncio.create_task(pump_out())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    message = protocol.parse_client_message(raw)
                except ValidationError as exc:
                    channel.offer_reliable(_error("bad_message", _summarize_validation(exc)))
                    continue
                await server.inbox.put((ws, message))
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            server.detach(ws)

    ui_dir = Path(static_dir) if static_dir else Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if ui_dir.is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:

        @app.get("/")
        async def index():
            return HTMLResponse(_FALLBACK_PAGE)

    return app
