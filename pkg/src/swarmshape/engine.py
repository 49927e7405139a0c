"""Deterministic fixed-timestep world.

Physics integrates every ``dt_physics``; control decisions run every
``dt_control`` and act on the observation captured one control period
earlier (sensing/compute/radio latency collapses into a single-period
delay). The controller dead-reckons through that delay with the commands
it knows it issued, blending prediction and delayed measurement with a
fixed 0.5 gain, so positional noise is filtered but no fresh information
is ever used early.

Randomness is counter-based and keyed per robot and per purpose, which
makes runs bit-reproducible regardless of iteration order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from enum import IntEnum
from typing import Callable, Sequence

import numpy as np

from .actuator import (
    BODY_RADIUS,
    MIN_LENGTH,
    ActuatorNoise,
    ActuatorUnit,
    Disc,
    Mount,
    command_length,
    footprint,
    step_actuator,
)
from .assignment import InfeasibleAssignmentError, build_cost_matrix, solve_assignment
from .geometry import Point, Polyline, Pose, dist, wrap_angle
from .interaction import InputClassifier, InputEvent, InputKind, refit_on_drag, refit_sine
from .motion import (
    DRIVEN_PHASES,
    BehaviorPhase,
    HalfPlane,
    NeighborDisc,
    PidState,
    WheelCommand,
    behavior_step,
    resolve_velocity,
    rotate_in_place,
    step_kinematics,
    track_velocity,
)
from .shapes import (
    AnimationPlan,
    DrawnLines,
    FidelityWarning,
    Rectangle,
    ShapeSpec,
    SineWave,
    SvgContour,
    TargetEntry,
    TargetMode,
    TargetSet,
    compile_shape,
    coverage_error,
    sequence_keyframes,
)

Vec = tuple[float, float]


class ScenarioError(ValueError):
    """A scenario document or world configuration is invalid."""


class Purpose(IntEnum):
    OBS_NOISE = 0
    DROPOUT = 1
    ACTUATOR = 2


class RngHub:
    """Per-robot, per-purpose Philox streams derived from one seed."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._streams: dict[tuple[int, int], np.random.Generator] = {}

    def stream(self, robot_id: int, purpose: Purpose) -> np.random.Generator:
        key = (robot_id, int(purpose))
        if key not in self._streams:
            ss = np.random.SeedSequence(entropy=self.seed, spawn_key=key)
            self._streams[key] = np.random.Generator(np.random.Philox(ss))
        return self._streams[key]


@dataclass(frozen=True)
class SimParams:
    """All tunable constants. Distances mm, times s, speeds mm/s."""

    dt_physics: float = 0.01
    dt_control: float = 0.151
    v_max: float = 170.0
    actuator_rate: float = 33.0
    pos_threshold: float = 10.0
    ang_threshold_deg: float = 5.0
    world_width: float = 1150.0
    world_height: float = 740.0
    tracking_loss_rate: float = 0.079
    position_noise_sigma: float = 0.0
    actuator_noise_sigma: float = 0.0
    seed: int = 0
    body_radius: float = BODY_RADIUS
    track_width: float = 30.0
    rvo_time_horizon: float = 2.0
    rvo_static_horizon: float = 0.5
    rvo_neighbor_cutoff: float = 200.0
    rvo_margin: float = 3.0
    pid_kp: float = 4.0
    pid_ki: float = 0.0
    pid_kd: float = 0.2
    hold_time: float = 1.0
    max_sim_time: float = 120.0
    # reserved: skip retraction when the planner sees no conflict (not implemented)
    retract_only_on_collision: bool = False

    def __post_init__(self):
        if self.dt_physics <= 0.0 or self.dt_control <= 0.0:
            raise ValueError("timesteps must be positive")
        if self.dt_physics > self.dt_control:
            raise ValueError("dt_physics must not exceed dt_control")
        for name in ("v_max", "actuator_rate", "world_width", "world_height"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.retract_only_on_collision:
            raise NotImplementedError("retract_only_on_collision is reserved but not implemented")


@dataclass
class RobotState:
    id: int
    pose: Pose
    units: list[ActuatorUnit] = field(default_factory=lambda: [ActuatorUnit()])
    phase: BehaviorPhase = BehaviorPhase.IDLE
    goal: TargetEntry | None = None
    command: WheelCommand = WheelCommand()
    commanded_velocity: Vec = (0.0, 0.0)
    pid: PidState = field(default_factory=PidState)
    travel: float = 0.0

    @property
    def extension(self) -> float:
        return self.units[0].length if self.units else MIN_LENGTH


@dataclass
class SimObject:
    center: Point
    radius: float
    pushable: bool = True


@dataclass(frozen=True)
class ObservedPose:
    pose: Pose
    driven: bool
    time: float


@dataclass
class _Controller:
    """Controller-side belief about one robot."""

    estimate: Pose
    last_cmd: WheelCommand = WheelCommand()
    drop_remaining: int = 0
    initialized: bool = False
    drop_cooldown: bool = False  # a seen tick must separate dropout episodes
    detour_sign: int = 0  # committed wall-follow direction while wedged
    preferred_detour: int = 0  # sticky side so repeat wedges march one way


@dataclass
class Metrics:
    makespan: float | None
    min_separation: float | None
    coverage_error: float | None
    total_travel: float
    completed: bool
    sim_time: float
    events: list[tuple[float, str, str]]

    def to_dict(self) -> dict:
        return {
            "makespan_s": self.makespan,
            "min_separation_mm": self.min_separation,
            "coverage_error_mm": self.coverage_error,
            "total_travel_mm": self.total_travel,
            "completed": self.completed,
            "sim_time_s": self.sim_time,
            "events": [[t, kind, text] for t, kind, text in self.events],
        }


class _ControlView:
    """Robot as the controller sees it: estimated pose, true internal state."""

    __slots__ = ("pose", "phase", "goal", "units")

    def __init__(self, pose, phase, goal, units):
        self.pose = pose
        self.phase = phase
        self.goal = goal
        self.units = units


class Simulation:
    """Single-owner world; step() advances exactly one physics tick."""

    def __init__(
        self,
        params: SimParams,
        robots: Sequence[RobotState],
        objects: Sequence[SimObject] = (),
        collect_log: bool = False,
    ):
        self.params = params
        self.robots: list[RobotState] = list(robots)
        for r in self.robots:
            self._validate_inside(r.pose)
            r.pid = PidState(kp=params.pid_kp, ki=params.pid_ki, kd=params.pid_kd)
        self.objects: list[SimObject] = [replace(o) for o in objects]
        self.rng = RngHub(params.seed)
        self.classifier = InputClassifier(angle_threshold_deg=params.ang_threshold_deg)
        self.tick = 0
        self.n_controls = 0
        self._last_control_time = 0.0
        self._pending_obs: dict[int, ObservedPose] | None = None
        self.controllers: dict[int, _Controller] = {
            r.id: _Controller(estimate=r.pose) for r in self.robots
        }
        self.events: list[tuple[float, str, str]] = []
        self.input_events: list[InputEvent] = []
        self.arrivals: list[tuple[float, int, float, float]] = []
        self.plan: AnimationPlan | None = None
        self.frame_idx = 0
        self.active_spec: ShapeSpec | None = None
        self.active_mode: TargetMode = TargetMode.LINE
        self.reference: list[Polyline] | None = None
        self.assigned: dict[int, TargetEntry] = {}
        self._all_holding_since: float | None = None
        self.completed = False
        self.makespan: float | None = None
        self.min_separation = math.inf
        self._next_robot_id = max((r.id for r in self.robots), default=-1) + 1
        self.collect_log = collect_log
        self.log_lines: list[str] = []
        self.on_event: Callable[[float, str, str], None] | None = None

    # -- world time ---------------------------------------------------------

    @property
    def time(self) -> float:
        return self.tick * self.params.dt_physics

    # -- public control surface ---------------------------------------------

    def set_shape(self, spec: ShapeSpec, mode: TargetMode = TargetMode.LINE) -> None:
        """Compile a shape for the current robot count and dispatch it."""
        self.plan = None
        self.active_spec = spec
        self.active_mode = mode
        self.reference = _reference_for(spec)
        self._dispatch(self._compile_active())

    def set_keyframes(
        self, frames: Sequence[ShapeSpec], hold: float, mode: TargetMode = TargetMode.LINE
    ) -> None:
        self.plan = sequence_keyframes(frames, len(self.robots), hold, mode)
        self._keyframe_specs = list(frames)
        self.frame_idx = 0
        self.active_spec = frames[0]
        self.active_mode = mode
        self.reference = _reference_for(frames[0])
        self._dispatch(self.plan.frames[0])

    def dispatch(self, target_set: TargetSet) -> None:
        """Assign an explicit target set (bypasses shape compilation)."""
        self.plan = None
        self.active_spec = None
        self.reference = None
        self._dispatch(target_set)

    def drag_robot(self, robot_id: int, pose: Pose) -> None:
        """Externally relocate a robot, as a user's hand would. The control
        side only learns of it through the delayed observation stream."""
        robot = self._robot(robot_id)
        self._validate_inside(pose)
        robot.pose = pose

    def place_robot(self, pose: Pose, units: list[ActuatorUnit] | None = None) -> int:
        self._validate_inside(pose)
        rid = self._next_robot_id
        self._next_robot_id += 1
        robot = RobotState(
            id=rid,
            pose=pose,
            units=units if units is not None else [ActuatorUnit()],
            pid=PidState(kp=self.params.pid_kp, ki=self.params.pid_ki, kd=self.params.pid_kd),
        )
        self.robots.append(robot)
        self.controllers[rid] = _Controller(estimate=pose)
        return rid

    def remove_robot(self, robot_id: int) -> None:
        robot = self._robot(robot_id)
        self.robots.remove(robot)
        self.controllers.pop(robot_id, None)
        self.assigned.pop(robot_id, None)

    def run(self, max_time: float | None = None) -> None:
        """Step until the plan completes or the time budget runs out."""
        budget = self.params.max_sim_time if max_time is None else max_time
        while not self.completed and self.time < budget - 1e-12:
            self.step()

    # -- core loop ------------------------------------------------------------

    def step(self) -> None:
        t = self.time
        if t >= self.n_controls * self.params.dt_control - 1e-9:
            self._control_tick(t)
            self.n_controls += 1
            self._last_control_time = t
        dt = self.params.dt_physics
        for robot in self.robots:
            new_pose = step_kinematics(robot.pose, robot.command, dt, self.params.track_width)
            new_pose = self._clamp_inside(new_pose)
            robot.travel += robot.pose.distance_to(new_pose)
            robot.pose = new_pose
            for unit in robot.units:
                step_actuator(unit, dt)
        if self.objects:
            self._push_objects()
        self._track_separation()
        self.tick += 1

    # -- control tick ---------------------------------------------------------

    def _control_tick(self, t: float) -> None:
        interval = t - self._last_control_time if self.n_controls > 0 else 0.0
        captured = self._capture_observation(t)
        delivered = captured if self._pending_obs is None else self._pending_obs
        self._pending_obs = captured

        obs_time = next(iter(delivered.values())).time if delivered else t
        observed_poses = {rid: o.pose for rid, o in delivered.items()}
        driven = {rid for rid, o in delivered.items() if o.driven}
        events = self.classifier.update(obs_time, observed_poses, driven)
        for event in events:
            self.input_events.append(event)
            self._log(t, "input", f"{event.kind.value} robot {event.robot_id}")
            self._react(event)

        for robot in self.robots:
            ctrl = self.controllers[robot.id]
            obs = delivered.get(robot.id)
            self._update_estimate(ctrl, obs, interval)

        # decide from a consistent snapshot, then commit in id order
        est = {r.id: self.controllers[r.id].estimate for r in self.robots}
        # the avoidance constraints must see what robots actually do: wheel
        # speed projected on the heading, not the holonomic command
        vel = {r.id: _executed_velocity(r.command, est[r.id]) for r in self.robots}
        phase_before = {r.id: r.phase for r in self.robots}
        decisions = {}
        for robot in self.robots:
            view = _ControlView(est[robot.id], robot.phase, robot.goal, robot.units)
            decisions[robot.id] = behavior_step(view, self.params)

        noise = ActuatorNoise(
            sigma=self.params.actuator_noise_sigma,
            enabled=self.params.actuator_noise_sigma > 0.0,
        )
        for robot in self.robots:
            d = decisions[robot.id]
            ctrl = self.controllers[robot.id]
            wheels = WheelCommand()
            velocity: Vec = (0.0, 0.0)
            if d.phase == BehaviorPhase.NAVIGATING and d.velocity is not None:
                caps = self._static_caps(robot, est, vel, phase_before)
                resolved = self._detour_or_direct(
                    robot, ctrl, est, vel, phase_before, d.velocity, caps
                )
                speed = math.hypot(*resolved)
                heading_err = (
                    abs(wrap_angle(math.atan2(resolved[1], resolved[0]) - est[robot.id].theta))
                    if speed > 1e-9
                    else 0.0
                )
                if speed > 1e-9 and heading_err >= math.pi / 2.0:
                    # facing the wrong way entirely: turn in place first
                    wheels = rotate_in_place(
                        math.atan2(resolved[1], resolved[0]),
                        est[robot.id],
                        robot.pid,
                        self.params.dt_control,
                        track_width=self.params.track_width,
                        wheel_max=self.params.v_max,
                    )
                else:
                    # scale speed down while misaligned so the executed motion
                    # stays close to the collision-safe command as it turns
                    align = math.cos(heading_err) ** 2
                    wheels = track_velocity(
                        (resolved[0] * align, resolved[1] * align),
                        est[robot.id],
                        robot.pid,
                        self.params.dt_control,
                        track_width=self.params.track_width,
                        wheel_max=self.params.v_max,
                    )
                wheels = self._cap_wheels(wheels, est[robot.id], caps)
                velocity = resolved
            elif d.phase == BehaviorPhase.ORIENTING and d.target_heading is not None:
                wheels = rotate_in_place(
                    d.target_heading,
                    est[robot.id],
                    robot.pid,
                    self.params.dt_control,
                    track_width=self.params.track_width,
                    wheel_max=self.params.v_max,
                )
            if d.actuator_target is not None:
                stream = self.rng.stream(robot.id, Purpose.ACTUATOR)
                for unit in robot.units:
                    command_length(
                        unit,
                        d.actuator_target,
                        noise,
                        stream,
                        on_warning=lambda msg: self._log(t, "warning", msg),
                    )
            if d.phase == BehaviorPhase.HOLDING and robot.phase != BehaviorPhase.HOLDING:
                self._record_arrival(t, robot)
            robot.phase = d.phase
            robot.command = wheels
            robot.commanded_velocity = velocity
            ctrl.last_cmd = wheels

        self._advance_plan(t)
        if self.collect_log:
            for robot in self.robots:
                self.log_lines.append(
                    f"{t:.3f} {robot.id} {robot.pose.x:.6f} {robot.pose.y:.6f} "
                    f"{robot.pose.theta:.6f} {robot.extension:.6f} {robot.phase.name.lower()}"
                )

    def _margin(self, velocity: Vec) -> float:
        # nonholonomic execution lags the commanded velocity while the heading
        # converges; the lag scales with speed, so fast robots carry extra
        # clearance while slow final approaches keep the tight margin
        return self.params.rvo_margin + 0.05 * math.hypot(*velocity)

    def _static_cap(self, me: Point, center: Point, keepout: float) -> tuple[float, float, float]:
        """Radial speed cap toward a static disc: approach no faster than the
        remaining gap per static horizon. Returns (nx, ny, cap); always admits
        v = 0, so caps from non-overlapping statics never conflict."""
        d = dist(me, center)
        if d <= 1e-9:
            n = (1.0, 0.0)
        else:
            n = ((center[0] - me[0]) / d, (center[1] - me[1]) / d)
        c = max(0.0, d - keepout) / self.params.rvo_static_horizon
        return (n[0], n[1], c)

    @staticmethod
    def _cap_half_plane(cap: tuple[float, float, float]) -> HalfPlane:
        nx, ny, c = cap
        return HalfPlane(point=(c * nx, c * ny), direction=(-ny, nx))

    def _detour_or_direct(self, robot, ctrl, est, vel, phases, preferred: Vec, caps) -> Vec:
        """Velocity selection with wedge escape.

        Formed contours act as picket fences; a robot aimed straight at a
        goal beyond one settles into a zero-velocity pocket between two
        parked robots. When that happens, commit to a tangential
        (wall-following) detour direction and keep it until the direct
        route resolves to real speed again.
        """
        direct = self._avoid(robot, est, vel, phases, preferred, caps)
        goal_dist = est[robot.id].distance_to(robot.goal.pose)
        near_goal = goal_dist <= 3.0 * self.params.pos_threshold
        if ctrl.detour_sign == 0:
            if math.hypot(*direct) >= 5.0 or near_goal:
                return direct
        elif math.hypot(*direct) >= 40.0 or near_goal:
            ctrl.detour_sign = 0
            return direct
        px, py = preferred
        norm = math.hypot(px, py)
        if norm > 1e-9:
            k = min(1.0, 80.0 / norm)
            px, py = px * k, py * k
        if ctrl.detour_sign:
            signs = (ctrl.detour_sign, -ctrl.detour_sign)
        elif ctrl.preferred_detour:
            signs = (ctrl.preferred_detour, -ctrl.preferred_detour)
        else:
            signs = (1, -1)
        for sign in signs:
            cand = (-py * sign, px * sign)  # rotate preferred by +/-90 degrees
            resolved = self._avoid(robot, est, vel, phases, cand, caps)
            if math.hypot(*resolved) >= 10.0:
                ctrl.detour_sign = sign
                ctrl.preferred_detour = sign
                return resolved
        ctrl.detour_sign = 0
        reverse = (-px, -py)
        resolved = self._avoid(robot, est, vel, phases, reverse, caps)
        if math.hypot(*resolved) >= 10.0:
            return resolved
        return direct

    def _static_caps(self, robot, est, vel, phases) -> list[tuple[float, float, float]]:
        p = self.params
        me = est[robot.id]
        my_margin = self._margin(vel[robot.id])
        r = p.body_radius + my_margin
        x, y = me.position
        h = p.rvo_static_horizon
        caps = [
            (-1.0, 0.0, max(0.0, x - r) / h),
            (1.0, 0.0, max(0.0, p.world_width - r - x) / h),
            (0.0, -1.0, max(0.0, y - r) / h),
            (0.0, 1.0, max(0.0, p.world_height - r - y) / h),
        ]
        for other in self.robots:
            if other.id == robot.id:
                continue
            opos = est[other.id].position
            if dist(me.position, opos) > p.rvo_neighbor_cutoff:
                continue
            ovel = vel[other.id] if phases[other.id] == BehaviorPhase.NAVIGATING else (0.0, 0.0)
            if math.hypot(*ovel) <= 1e-6:
                # a parked robot is exact; only this robot's own execution
                # slack pads the physical contact distance
                caps.append(self._static_cap(me.position, opos, 2.0 * p.body_radius + my_margin))
        for obj in self.objects:
            if obj.pushable:
                continue
            if dist(me.position, obj.center) > p.rvo_neighbor_cutoff + obj.radius:
                continue
            caps.append(
                self._static_cap(
                    me.position,
                    obj.center,
                    p.body_radius + obj.radius + my_margin + p.rvo_margin,
                )
            )
        return caps

    def _avoid(self, robot, est, vel, phases, preferred: Vec, static_caps) -> Vec:
        p = self.params
        me = est[robot.id]
        my_velocity = vel[robot.id]
        radius = p.body_radius + self._margin(my_velocity)
        neighbors = []
        hard: list[HalfPlane] = [self._cap_half_plane(cap) for cap in static_caps]
        for other in self.robots:
            if other.id == robot.id:
                continue
            opos = est[other.id].position
            if dist(me.position, opos) > p.rvo_neighbor_cutoff:
                continue
            # only robots that are actually translating share avoidance duty;
            # one that is parked or turning in place cannot execute its half
            ovel = vel[other.id] if phases[other.id] == BehaviorPhase.NAVIGATING else (0.0, 0.0)
            if math.hypot(*ovel) > 1e-6:
                neighbors.append(
                    NeighborDisc(
                        position=opos,
                        velocity=ovel,
                        radius=p.body_radius + self._margin(ovel),
                        responsibility=0.5,
                    )
                )
        return resolve_velocity(
            me.position,
            my_velocity,
            radius,
            preferred,
            neighbors,
            v_max=p.v_max,
            time_horizon=p.rvo_time_horizon,
            dt=p.dt_control,
            boundary=hard,
        )

    def _cap_wheels(self, wheels: WheelCommand, pose: Pose, static_caps) -> WheelCommand:
        """Scale the forward component so the velocity the wheels actually
        execute (speed along the current heading) honours every static cap.
        Rotation is untouched; the commanded velocity may point elsewhere,
        but penetration-wise only the executed motion matters."""
        forward = wheels.linear
        if forward <= 1e-9 or not static_caps:
            return wheels
        hx, hy = math.cos(pose.theta), math.sin(pose.theta)
        scale = 1.0
        for nx, ny, cap in static_caps:
            radial = forward * (hx * nx + hy * ny)
            if radial > cap:
                scale = min(scale, cap / radial if radial > 0 else 0.0)
        if scale >= 1.0:
            return wheels
        omega = wheels.angular(self.params.track_width)
        forward *= scale
        left = forward - omega * self.params.track_width / 2.0
        right = forward + omega * self.params.track_width / 2.0
        peak = max(abs(left), abs(right))
        if peak > self.params.v_max:
            k = self.params.v_max / peak
            left *= k
            right *= k
        return WheelCommand(left, right)

    # -- observation & estimation ---------------------------------------------

    def _capture_observation(self, t: float) -> dict[int, ObservedPose]:
        p = self.params
        out: dict[int, ObservedPose] = {}
        for robot in self.robots:
            ctrl = self.controllers[robot.id]
            if p.tracking_loss_rate > 0.0:
                if ctrl.drop_remaining > 0:
                    ctrl.drop_remaining -= 1
                    ctrl.drop_cooldown = ctrl.drop_remaining == 0
                    continue
                if ctrl.drop_cooldown:
                    # guaranteed reacquisition tick: dropouts never chain, so
                    # an absence can never exceed the modelled 2 ticks
                    ctrl.drop_cooldown = False
                else:
                    stream = self.rng.stream(robot.id, Purpose.DROPOUT)
                    if stream.random() < p.tracking_loss_rate:
                        length = 1 if stream.random() < 0.5 else 2
                        ctrl.drop_remaining = length - 1
                        ctrl.drop_cooldown = ctrl.drop_remaining == 0
                        continue
            pose = robot.pose
            if p.position_noise_sigma > 0.0:
                nstream = self.rng.stream(robot.id, Purpose.OBS_NOISE)
                dx, dy = nstream.normal(0.0, p.position_noise_sigma, 2)
                pose = Pose(pose.x + float(dx), pose.y + float(dy), pose.theta)
            out[robot.id] = ObservedPose(pose=pose, driven=robot.phase in DRIVEN_PHASES, time=t)
        return out

    def _update_estimate(self, ctrl: _Controller, obs: ObservedPose | None, interval: float) -> None:
        if interval > 0.0:
            predicted = step_kinematics(ctrl.estimate, ctrl.last_cmd, interval, self.params.track_width)
        else:
            predicted = ctrl.estimate
        if obs is None:
            ctrl.estimate = predicted
            return
        if interval > 0.0:
            measured = step_kinematics(obs.pose, ctrl.last_cmd, interval, self.params.track_width)
        else:
            measured = obs.pose
        if not ctrl.initialized:
            ctrl.estimate = measured
            ctrl.initialized = True
            return
        # fixed-gain observer: the motion model is exact, so a small
        # correction gain mostly filters measurement noise while still
        # pulling the estimate to externally imposed motion within ~1 s
        g = 0.25
        ctrl.estimate = Pose(
            predicted.x + g * (measured.x - predicted.x),
            predicted.y + g * (measured.y - predicted.y),
            _blend_angle(predicted.theta, measured.theta, g),
        )

    # -- reactions --------------------------------------------------------------

    def _react(self, event: InputEvent) -> None:
        if event.kind in (InputKind.PLACE, InputKind.PICK_UP):
            if self.active_spec is not None and self.robots and self.plan is None:
                self._recompile_active()
            return
        if event.kind != InputKind.MOVE or event.after is None:
            return
        spec = self.active_spec
        if isinstance(spec, (DrawnLines, Rectangle)):
            new_spec = refit_on_drag(self.assigned, event.robot_id, event.after)
            if new_spec is not None:
                self.active_spec = new_spec
                self.reference = _reference_for(new_spec)
                self._recompile_active()
        elif isinstance(spec, SineWave):
            entry = self.assigned.get(event.robot_id)
            if entry is None:
                return
            ox = spec.origin[0]
            end_x = ox + spec.wavelength
            tol = 1e-6
            if abs(entry.pose.x - end_x) < tol:
                new_spec = refit_sine(spec, event.after.x, moved_first_end=False)
            elif abs(entry.pose.x - ox) < tol:
                new_spec = refit_sine(spec, event.after.x, moved_first_end=True)
            else:
                return
            if new_spec is not None:
                self.active_spec = new_spec
                self._recompile_active()

    def _compile_active(self) -> TargetSet:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", FidelityWarning)
            target_set = compile_shape(self.active_spec, len(self.robots), self.active_mode)
        for w in caught:
            self._log(self.time, "warning", str(w.message))
        return target_set

    def _recompile_active(self) -> None:
        try:
            self._dispatch(self._compile_active())
        except (ValueError, InfeasibleAssignmentError) as exc:
            self._log(self.time, "error", f"recompile failed: {exc}")

    # -- dispatch & plan ---------------------------------------------------------

    def _dispatch(self, target_set: TargetSet) -> None:
        if not self.robots:
            raise ScenarioError("cannot dispatch targets into an empty world")
        if len(target_set.entries) > len(self.robots):
            raise InfeasibleAssignmentError(
                f"{len(target_set.entries)} targets but only {len(self.robots)} robots"
            )
        robot_poses = [self.controllers[r.id].estimate for r in self.robots]
        target_poses = [e.pose for e in target_set.entries]
        assignment = solve_assignment(build_cost_matrix(robot_poses, target_poses))
        self.assigned = {}
        assigned_rows = {}
        for target_idx, row in assignment.pairs.items():
            assigned_rows[row] = target_set.entries[target_idx]
        for row, robot in enumerate(self.robots):
            entry = assigned_rows.get(row)
            if entry is None:
                robot.goal = None
                robot.phase = BehaviorPhase.IDLE
                continue
            robot.goal = entry
            robot.phase = BehaviorPhase.RETRACTING
            robot.pid.reset()
            for unit in robot.units:
                unit.mount = entry.mount
            self.assigned[robot.id] = entry
        self.active_mode = target_set.mode
        self._all_holding_since = None
        self.completed = False
        self._log(self.time, "dispatch", f"{len(target_set.entries)} targets assigned")

    def _advance_plan(self, t: float) -> None:
        if self.completed:
            return
        targeted = [r for r in self.robots if r.goal is not None]
        if not targeted:
            return
        if not all(r.phase == BehaviorPhase.HOLDING for r in targeted):
            self._all_holding_since = None
            return
        if self._all_holding_since is None:
            self._all_holding_since = t
            final = self.plan is None or self.frame_idx == len(self.plan.frames) - 1
            if final and self.makespan is None:
                self.makespan = t
        hold = self.plan.hold_time if self.plan is not None else self.params.hold_time
        if t - self._all_holding_since < hold - 1e-9:
            return
        if self.plan is not None and self.frame_idx < len(self.plan.frames) - 1:
            self.frame_idx += 1
            spec = self._keyframe_specs[self.frame_idx]
            self.active_spec = spec
            self.reference = _reference_for(spec)
            self._log(t, "keyframe", f"advancing to frame {self.frame_idx}")
            self._dispatch(self.plan.frames[self.frame_idx])
        else:
            self.completed = True
            self._log(t, "complete", "all robots holding")

    # -- objects -------------------------------------------------------------------

    def _push_objects(self) -> None:
        pushable = [o for o in self.objects if o.pushable]
        if not pushable:
            return
        shapes = []
        for robot in self.robots:
            shapes.extend(footprint(robot.pose, robot.units))
        for obj in self.objects:
            if not obj.pushable:
                shapes.append(Disc(obj.center, obj.radius))
        resolved = False
        for _ in range(16):
            moved = 0.0
            for obj in pushable:
                for shape in shapes:
                    moved += self._push_out(obj, shape)
                for other in self.objects:
                    if other is obj or not other.pushable:
                        continue
                    moved += self._separate(obj, other)
                moved += self._clamp_object(obj)
            if moved <= 1e-9:
                resolved = True
                break
        if not resolved:
            worst = max(
                (self._penetration(o, s) for o in pushable for s in shapes), default=0.0
            )
            for i, a in enumerate(self.objects):
                for b in self.objects[i + 1 :]:
                    worst = max(worst, (a.radius + b.radius) - dist(a.center, b.center))
            if worst > 1e-6:
                self._log(self.time, "warning", f"object push unresolved; residual {worst:.3g} mm")

    @staticmethod
    def _closest_on_shape(shape, p: Point) -> tuple[Point, float]:
        if isinstance(shape, Disc):
            return shape.center, shape.radius
        ax, ay = shape.a
        bx, by = shape.b
        dx, dy = bx - ax, by - ay
        d2 = dx * dx + dy * dy
        if d2 <= 1e-12:
            return shape.a, shape.radius
        t = max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / d2))
        return (ax + t * dx, ay + t * dy), shape.radius

    def _penetration(self, obj: SimObject, shape) -> float:
        closest, radius = self._closest_on_shape(shape, obj.center)
        return (radius + obj.radius) - dist(closest, obj.center)

    def _push_out(self, obj: SimObject, shape) -> float:
        """Translate ``obj`` to contact along the minimum-penetration normal.

        If the contact point would leave the world, the disc instead slides
        along the wall to the nearest in-bounds contact (constrained
        projection), which is what lets robots plow objects along walls.
        """
        closest, radius = self._closest_on_shape(shape, obj.center)
        gap = dist(closest, obj.center)
        reach = radius + obj.radius
        pen = reach - gap
        if pen <= 1e-9:
            return 0.0
        if gap <= 1e-9:
            normal = (1.0, 0.0)  # deterministic escape for a centred disc
        else:
            normal = ((obj.center[0] - closest[0]) / gap, (obj.center[1] - closest[1]) / gap)
        tx = closest[0] + normal[0] * reach
        ty = closest[1] + normal[1] * reach
        lo_x, hi_x = obj.radius, self.params.world_width - obj.radius
        lo_y, hi_y = obj.radius, self.params.world_height - obj.radius
        cx = min(max(tx, lo_x), hi_x)
        cy = min(max(ty, lo_y), hi_y)
        if cy != ty and cx == tx:
            # pinned against a horizontal wall: slide in x to the contact circle
            dy = cy - closest[1]
            rem = reach * reach - dy * dy
            if rem > 0.0:
                sx = 1.0 if obj.center[0] >= closest[0] else -1.0
                cx = min(max(closest[0] + sx * math.sqrt(rem), lo_x), hi_x)
        elif cx != tx and cy == ty:
            dx = cx - closest[0]
            rem = reach * reach - dx * dx
            if rem > 0.0:
                sy = 1.0 if obj.center[1] >= closest[1] else -1.0
                cy = min(max(closest[1] + sy * math.sqrt(rem), lo_y), hi_y)
        moved = dist(obj.center, (cx, cy))
        obj.center = (cx, cy)
        return moved

    @staticmethod
    def _separate(a: SimObject, b: SimObject) -> float:
        gap = dist(a.center, b.center)
        pen = (a.radius + b.radius) - gap
        if pen <= 1e-9:
            return 0.0
        if gap <= 1e-9:
            normal = (1.0, 0.0)
        else:
            normal = ((a.center[0] - b.center[0]) / gap, (a.center[1] - b.center[1]) / gap)
        a.center = (a.center[0] + normal[0] * pen / 2.0, a.center[1] + normal[1] * pen / 2.0)
        b.center = (b.center[0] - normal[0] * pen / 2.0, b.center[1] - normal[1] * pen / 2.0)
        return pen

    def _clamp_object(self, obj: SimObject) -> float:
        x = min(max(obj.center[0], obj.radius), self.params.world_width - obj.radius)
        y = min(max(obj.center[1], obj.radius), self.params.world_height - obj.radius)
        moved = dist(obj.center, (x, y))
        obj.center = (x, y)
        return moved

    # -- bookkeeping ------------------------------------------------------------------

    def _track_separation(self) -> None:
        robots = self.robots
        for i in range(len(robots)):
            xi, yi = robots[i].pose.x, robots[i].pose.y
            for j in range(i + 1, len(robots)):
                d = math.hypot(robots[j].pose.x - xi, robots[j].pose.y - yi)
                if d < self.min_separation:
                    self.min_separation = d

    def _record_arrival(self, t: float, robot: RobotState) -> None:
        if robot.goal is None:
            return
        pos_err = robot.pose.distance_to(robot.goal.pose)
        ang_err = abs(wrap_angle(robot.goal.pose.theta - robot.pose.theta))
        self.arrivals.append((t, robot.id, pos_err, ang_err))

    def _robot(self, robot_id: int) -> RobotState:
        for r in self.robots:
            if r.id == robot_id:
                return r
        raise KeyError(f"no robot with id {robot_id}")

    def _validate_inside(self, pose: Pose) -> None:
        r = self.params.body_radius
        if not (r <= pose.x <= self.params.world_width - r) or not (
            r <= pose.y <= self.params.world_height - r
        ):
            raise ScenarioError(
                f"pose ({pose.x:.1f}, {pose.y:.1f}) outside the "
                f"{self.params.world_width:.0f}x{self.params.world_height:.0f} mm world"
            )

    def _clamp_inside(self, pose: Pose) -> Pose:
        r = self.params.body_radius
        x = min(max(pose.x, r), self.params.world_width - r)
        y = min(max(pose.y, r), self.params.world_height - r)
        if x == pose.x and y == pose.y:
            return pose
        return Pose(x, y, pose.theta)

    def _log(self, t: float, kind: str, text: str) -> None:
        self.events.append((round(t, 6), kind, text))
        if self.on_event is not None:
            self.on_event(t, kind, text)

    # -- outputs ---------------------------------------------------------------------

    def snapshot(self) -> dict:
        """Immutable JSON-ready view of the world."""
        phase_counts: dict[str, int] = {}
        for r in self.robots:
            key = r.phase.name.lower()
            phase_counts[key] = phase_counts.get(key, 0) + 1
        return {
            "v": 1,
            "time": round(self.time, 6),
            "completed": self.completed,
            "robots": [
                {
                    "id": r.id,
                    "x": r.pose.x,
                    "y": r.pose.y,
                    "theta": r.pose.theta,
                    "phase": r.phase.name.lower(),
                    "extension": r.extension,
                    "mount": r.units[0].mount.value if r.units else Mount.HORIZONTAL.value,
                    "goal": None
                    if r.goal is None
                    else {
                        "x": r.goal.pose.x,
                        "y": r.goal.pose.y,
                        "theta": r.goal.pose.theta,
                        "extension": r.goal.extension,
                    },
                }
                for r in self.robots
            ],
            "objects": [
                {"x": o.center[0], "y": o.center[1], "radius": o.radius, "pushable": o.pushable}
                for o in self.objects
            ],
            "phase_counts": phase_counts,
        }

    def holding_render_views(self) -> list[tuple[Pose, float, Mount]]:
        return [
            (r.pose, r.extension, r.units[0].mount if r.units else Mount.HORIZONTAL)
            for r in self.robots
            if r.phase == BehaviorPhase.HOLDING
        ]

    def metrics(self) -> Metrics:
        coverage = None
        if self.reference:
            views = self.holding_render_views()
            if views:
                coverage = coverage_error(views, self.reference, self.active_mode)
        return Metrics(
            makespan=self.makespan,
            min_separation=None if len(self.robots) < 2 else (
                None if math.isinf(self.min_separation) else self.min_separation
            ),
            coverage_error=coverage,
            total_travel=sum(r.travel for r in self.robots),
            completed=self.completed,
            sim_time=self.time,
            events=list(self.events),
        )

    def trajectory_log(self) -> str:
        header = "# trajectory v1: time_s robot_id x_mm y_mm theta_rad extension_mm phase\n"
        return header + "\n".join(self.log_lines) + ("\n" if self.log_lines else "")


def _blend_angle(a: float, b: float, g: float) -> float:
    wa, wb = 1.0 - g, g
    return math.atan2(
        wa * math.sin(a) + wb * math.sin(b), wa * math.cos(a) + wb * math.cos(b)
    )


def _executed_velocity(cmd: WheelCommand, pose: Pose) -> Vec:
    v = cmd.linear
    return (v * math.cos(pose.theta), v * math.sin(pose.theta))


def _reference_for(spec: ShapeSpec | None) -> list[Polyline] | None:
    if isinstance(spec, SvgContour):
        return list(spec.contours)
    if isinstance(spec, DrawnLines):
        return [Polyline((s.a, s.b)) for s in spec.segments]
    if isinstance(spec, Rectangle):
        cx, cy = spec.center
        w2, h2 = spec.width / 2.0, spec.height / 2.0
        return [
            Polyline(
                ((cx - w2, cy - h2), (cx + w2, cy - h2), (cx + w2, cy + h2), (cx - w2, cy + h2)),
                closed=True,
            )
        ]
    return None


def run_scenario(document, overrides: dict | None = None, collect_log: bool = True):
    """Validate and run a scenario document; returns (Metrics, log text, Simulation)."""
    from .scenario import build_simulation  # deferred: scenario builds on this module

    sim = build_simulation(document, overrides=overrides, collect_log=collect_log)
    sim.run()
    return sim.metrics(), sim.trajectory_log(), sim
