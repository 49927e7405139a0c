"""Per-robot navigation: reciprocal-velocity-obstacle velocity selection
(half-plane formulation), heading PID to differential-drive wheel commands,
exact arc kinematics, and the behaviour state machine.

Velocities are mm/s, angles radians. The velocity solver processes
constraints in input order and is fully deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

from .actuator import MAX_LENGTH, MIN_LENGTH
from .geometry import Point, Pose, wrap_angle

Vec = tuple[float, float]

_EPS = 1e-9


def _dot(a: Vec, b: Vec) -> float:
    return a[0] * b[0] + a[1] * b[1]


def _det(a: Vec, b: Vec) -> float:
    return a[0] * b[1] - a[1] * b[0]


def _abs_sq(a: Vec) -> float:
    return a[0] * a[0] + a[1] * a[1]


def _norm(a: Vec) -> float:
    return math.hypot(a[0], a[1])


@dataclass(frozen=True)
class WheelCommand:
    """Left/right wheel surface speeds in mm/s."""

    left: float = 0.0
    right: float = 0.0

    @property
    def linear(self) -> float:
        return (self.left + self.right) / 2.0

    def angular(self, track_width: float) -> float:
        return (self.right - self.left) / track_width


class BehaviorPhase(IntEnum):
    IDLE = 0
    RETRACTING = 1
    NAVIGATING = 2
    ORIENTING = 3
    TRANSFORMING = 4
    HOLDING = 5


DRIVEN_PHASES = frozenset(
    {
        BehaviorPhase.RETRACTING,
        BehaviorPhase.NAVIGATING,
        BehaviorPhase.ORIENTING,
        BehaviorPhase.TRANSFORMING,
    }
)


@dataclass
class PidState:
    """PID controller state with anti-windup clamping on the integral."""

    kp: float = 4.0
    ki: float = 0.0
    kd: float = 0.2
    integral: float = 0.0
    prev_error: float | None = None
    integral_limit: float = math.pi

    def update(self, error: float, dt: float) -> float:
        self.integral = min(max(self.integral + error * dt, -self.integral_limit), self.integral_limit)
        derivative = 0.0 if self.prev_error is None else (error - self.prev_error) / dt
        self.prev_error = error
        return self.kp * error + self.ki * self.integral + self.kd * derivative

    def reset(self) -> None:
        self.integral = 0.0
        self.prev_error = None


def preferred_velocity(position: Point, goal: Point, v_max: float, dt_control: float) -> Vec:
    """Velocity toward the goal: full speed when far, distance/dt_control on
    final approach so a single control period never overshoots."""
    dx, dy = goal[0] - position[0], goal[1] - position[1]
    d = math.hypot(dx, dy)
    if d <= _EPS:
        return (0.0, 0.0)
    speed = min(v_max, d / dt_control)
    return (dx / d * speed, dy / d * speed)


@dataclass(frozen=True)
class NeighborDisc:
    """Moving disc another robot must stay clear of.

    ``responsibility`` is this agent's share of the avoidance effort:
    0.5 between two cooperating robots, 1.0 against a static obstacle.
    """

    position: Point
    velocity: Vec
    radius: float
    responsibility: float = 0.5


@dataclass(frozen=True)
class HalfPlane:
    """Feasible velocities lie to the left of the directed line."""

    point: Vec
    direction: Vec


def _neighbor_half_plane(
    position: Point,
    velocity: Vec,
    radius: float,
    nb: NeighborDisc,
    inv_tau: float,
    inv_dt: float,
) -> HalfPlane:
    rel_pos = (nb.position[0] - position[0], nb.position[1] - position[1])
    rel_vel = (velocity[0] - nb.velocity[0], velocity[1] - nb.velocity[1])
    dist_sq = _abs_sq(rel_pos)
    comb_r = radius + nb.radius
    comb_r_sq = comb_r * comb_r

    if dist_sq > comb_r_sq:
        # velocity-obstacle cone truncated at the time horizon
        w = (rel_vel[0] - inv_tau * rel_pos[0], rel_vel[1] - inv_tau * rel_pos[1])
        w_len_sq = _abs_sq(w)
        dot1 = _dot(w, rel_pos)
        if dot1 < 0.0 and dot1 * dot1 > comb_r_sq * w_len_sq:
            # project on the cut-off circle
            w_len = math.sqrt(w_len_sq)
            unit_w = (w[0] / w_len, w[1] / w_len)
            direction = (unit_w[1], -unit_w[0])
            scale = comb_r * inv_tau - w_len
            u = (scale * unit_w[0], scale * unit_w[1])
        else:
            # project on the nearer cone leg
            leg = math.sqrt(dist_sq - comb_r_sq)
            if _det(rel_pos, w) > 0.0:
                direction = (
                    (rel_pos[0] * leg - rel_pos[1] * comb_r) / dist_sq,
                    (rel_pos[0] * comb_r + rel_pos[1] * leg) / dist_sq,
                )
            else:
                direction = (
                    -(rel_pos[0] * leg + rel_pos[1] * comb_r) / dist_sq,
                    (rel_pos[0] * comb_r - rel_pos[1] * leg) / dist_sq,
                )
            dot2 = _dot(rel_vel, direction)
            u = (dot2 * direction[0] - rel_vel[0], dot2 * direction[1] - rel_vel[1])
    else:
        # already overlapping: push apart within one control period
        w = (rel_vel[0] - inv_dt * rel_pos[0], rel_vel[1] - inv_dt * rel_pos[1])
        w_len = _norm(w)
        if w_len <= _EPS:
            # coincident centres and velocities: pick a deterministic direction
            unit_w = (1.0, 0.0)
        else:
            unit_w = (w[0] / w_len, w[1] / w_len)
        direction = (unit_w[1], -unit_w[0])
        scale = comb_r * inv_dt - w_len
        u = (scale * unit_w[0], scale * unit_w[1])

    r = nb.responsibility
    point = (velocity[0] + r * u[0], velocity[1] + r * u[1])
    return HalfPlane(point=point, direction=direction)


def _lp1(lines, line_no, radius, opt_v, direction_opt, result):
    line = lines[line_no]
    dot = _dot(line.point, line.direction)
    disc = dot * dot + radius * radius - _abs_sq(line.point)
    if disc < 0.0:
        return False, result
    sqrt_disc = math.sqrt(disc)
    t_left = -dot - sqrt_disc
    t_right = -dot + sqrt_disc
    for i in range(line_no):
        denom = _det(line.direction, lines[i].direction)
        numer = _det(
            lines[i].direction,
            (line.point[0] - lines[i].point[0], line.point[1] - lines[i].point[1]),
        )
        if abs(denom) <= _EPS:
            if numer < 0.0:
                return False, result
            continue
        t = numer / denom
        if denom >= 0.0:
            t_right = min(t_right, t)
        else:
            t_left = max(t_left, t)
        if t_left > t_right:
            return False, result
    if direction_opt:
        t = t_right if _dot(opt_v, line.direction) > 0.0 else t_left
    else:
        t = _dot(line.direction, (opt_v[0] - line.point[0], opt_v[1] - line.point[1]))
        t = max(t_left, min(t_right, t))
    return True, (line.point[0] + t * line.direction[0], line.point[1] + t * line.direction[1])


def _lp2(lines, radius, opt_v, direction_opt):
    if direction_opt:
        result = (opt_v[0] * radius, opt_v[1] * radius)
    elif _abs_sq(opt_v) > radius * radius:
        n = _norm(opt_v)
        result = (opt_v[0] / n * radius, opt_v[1] / n * radius)
    else:
        result = opt_v
    for i, line in enumerate(lines):
        if _det(line.direction, (line.point[0] - result[0], line.point[1] - result[1])) > 0.0:
            ok, new_result = _lp1(lines, i, radius, opt_v, direction_opt, result)
            if not ok:
                return i, result
            result = new_result
    return len(lines), result


def _lp3(lines, num_fixed, begin, radius, result):
    distance = 0.0
    for i in range(begin, len(lines)):
        line = lines[i]
        if _det(line.direction, (line.point[0] - result[0], line.point[1] - result[1])) > distance:
            proj = list(lines[:num_fixed])
            for j in range(num_fixed, i):
                other = lines[j]
                denom = _det(line.direction, other.direction)
                if abs(denom) <= _EPS:
                    if _dot(line.direction, other.direction) > 0.0:
                        continue
                    point = (
                        (line.point[0] + other.point[0]) / 2.0,
                        (line.point[1] + other.point[1]) / 2.0,
                    )
                else:
                    t = _det(
                        other.direction,
                        (line.point[0] - other.point[0], line.point[1] - other.point[1]),
                    ) / denom
                    point = (line.point[0] + t * line.direction[0], line.point[1] + t * line.direction[1])
                d = (other.direction[0] - line.direction[0], other.direction[1] - line.direction[1])
                dn = _norm(d)
                proj.append(HalfPlane(point, (d[0] / dn, d[1] / dn)))
            ok, new_result = _lp1(
                proj, len(proj) - 1, radius, (-line.direction[1], line.direction[0]), True, result
            )
            if ok:
                result = new_result
            distance = _det(line.direction, (line.point[0] - result[0], line.point[1] - result[1]))
    return result


def resolve_velocity(
    position: Point,
    velocity: Vec,
    radius: float,
    preferred: Vec,
    neighbors: list[NeighborDisc],
    *,
    v_max: float = 170.0,
    time_horizon: float = 2.0,
    dt: float = 0.151,
    boundary: list[HalfPlane] | None = None,
) -> Vec:
    """Collision-free velocity closest to ``preferred``.

    Each neighbour contributes a half-plane keeping this agent outside the
    neighbour's reciprocal velocity obstacle for ``time_horizon`` seconds.
    When the constraints admit no velocity, the least-penetrating one is
    returned. ``boundary`` half-planes (e.g. walls) are never relaxed.
    With no neighbours and no boundary the preferred velocity is returned
    unchanged.
    """
    fixed = list(boundary) if boundary else []
    if not neighbors and not fixed:
        return preferred
    inv_tau = 1.0 / time_horizon
    inv_dt = 1.0 / dt
    lines = fixed + [
        _neighbor_half_plane(position, velocity, radius, nb, inv_tau, inv_dt)
        for nb in neighbors
    ]
    fail_at, result = _lp2(lines, v_max, preferred, False)
    if fail_at < len(lines):
        result = _lp3(lines, len(fixed), fail_at, v_max, result)
    return result


def boundary_half_planes(
    position: Point,
    radius: float,
    width: float,
    height: float,
    time_horizon: float,
) -> list[HalfPlane]:
    """Velocity constraints that keep a disc inside the world rectangle."""
    x, y = position
    tau = time_horizon
    return [
        HalfPlane(((radius - x) / tau, 0.0), (0.0, -1.0)),            # vx >= (xmin+r-x)/tau
        HalfPlane(((width - radius - x) / tau, 0.0), (0.0, 1.0)),     # vx <= ...
        HalfPlane((0.0, (radius - y) / tau), (1.0, 0.0)),             # vy >= ...
        HalfPlane((0.0, (height - radius - y) / tau), (-1.0, 0.0)),   # vy <= ...
    ]


def track_velocity(
    desired: Vec,
    pose: Pose,
    pid: PidState,
    dt: float,
    *,
    track_width: float = 30.0,
    wheel_max: float = 170.0,
) -> WheelCommand:
    """Wheel speeds realising a planar velocity: PID steers the heading,
    forward speed scales with the cosine of the heading error (never
    negative), and both wheels rescale proportionally into limits.

    A zero desired velocity returns a zero command and leaves the PID
    state untouched.
    """
    speed = _norm(desired)
    if speed <= _EPS:
        return WheelCommand(0.0, 0.0)
    heading_error = wrap_angle(math.atan2(desired[1], desired[0]) - pose.theta)
    forward = speed * max(0.0, math.cos(heading_error))
    omega = pid.update(heading_error, dt)
    return _to_wheels(forward, omega, track_width, wheel_max)


def rotate_in_place(
    target_heading: float,
    pose: Pose,
    pid: PidState,
    dt: float,
    *,
    track_width: float = 30.0,
    wheel_max: float = 170.0,
) -> WheelCommand:
    """Rotation-only command toward a target heading (no forward motion)."""
    error = wrap_angle(target_heading - pose.theta)
    omega = pid.update(error, dt)
    return _to_wheels(0.0, omega, track_width, wheel_max)


def _to_wheels(forward: float, omega: float, track_width: float, wheel_max: float) -> WheelCommand:
    left = forward - omega * track_width / 2.0
    right = forward + omega * track_width / 2.0
    peak = max(abs(left), abs(right))
    if peak > wheel_max:
        scale = wheel_max / peak
        left *= scale
        right *= scale
    return WheelCommand(left, right)


def step_kinematics(pose: Pose, cmd: WheelCommand, dt: float, track_width: float = 30.0) -> Pose:
    """Exact differential-drive integration over ``dt`` (arc or straight)."""
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    v = cmd.linear
    omega = cmd.angular(track_width)
    if abs(omega) < 1e-9:
        return Pose(
            pose.x + v * math.cos(pose.theta) * dt,
            pose.y + v * math.sin(pose.theta) * dt,
            pose.theta,
        )
    r = v / omega
    theta1 = pose.theta + omega * dt
    return Pose(
        pose.x + r * (math.sin(theta1) - math.sin(pose.theta)),
        pose.y - r * (math.cos(theta1) - math.cos(pose.theta)),
        wrap_angle(theta1),
    )


@dataclass(frozen=True)
class BehaviorDecision:
    """Outcome of one behaviour evaluation: the (possibly advanced) phase
    plus at most one of a preferred velocity, a heading target, or an
    actuator length command."""

    phase: BehaviorPhase
    velocity: Vec | None = None
    target_heading: float | None = None
    actuator_target: float | None = None


def behavior_step(robot, params) -> BehaviorDecision:
    """Advance the per-robot behaviour machine one control decision.

    ``robot`` needs ``.pose``, ``.phase``, ``.goal`` (None or an object
    with ``.pose`` and ``.extension``) and ``.units``. The cycle is
    retract -> navigate -> orient -> transform -> hold; a phase is only
    left once its completion test passes, and several phases may collapse
    in one call when their tests already hold. Assigning a new goal is the
    engine's job and re-enters the cycle at retraction.
    """
    if robot.goal is None:
        return BehaviorDecision(BehaviorPhase.IDLE)
    phase = robot.phase
    if phase in (BehaviorPhase.IDLE, BehaviorPhase.RETRACTING):
        if all(u.at_base for u in robot.units):
            phase = BehaviorPhase.NAVIGATING
        else:
            return BehaviorDecision(BehaviorPhase.RETRACTING, actuator_target=MIN_LENGTH)
    goal_pose = robot.goal.pose
    pos_error = robot.pose.distance_to(goal_pose)
    ang_threshold = math.radians(params.ang_threshold_deg)
    if phase == BehaviorPhase.NAVIGATING:
        if pos_error < params.pos_threshold:
            phase = BehaviorPhase.ORIENTING
        else:
            return BehaviorDecision(
                BehaviorPhase.NAVIGATING,
                velocity=preferred_velocity(
                    robot.pose.position, goal_pose.position, params.v_max, params.dt_control
                ),
            )
    if phase == BehaviorPhase.ORIENTING:
        heading_error = abs(wrap_angle(goal_pose.theta - robot.pose.theta))
        if pos_error < params.pos_threshold and heading_error < ang_threshold:
            phase = BehaviorPhase.TRANSFORMING
        else:
            return BehaviorDecision(BehaviorPhase.ORIENTING, target_heading=goal_pose.theta)
    if phase == BehaviorPhase.TRANSFORMING:
        if all(u.move_complete and abs(u.commanded_length - _goal_ext(robot)) <= 1e-9 for u in robot.units):
            phase = BehaviorPhase.HOLDING
        else:
            return BehaviorDecision(BehaviorPhase.TRANSFORMING, actuator_target=_goal_ext(robot))
    return BehaviorDecision(BehaviorPhase.HOLDING)


def _goal_ext(robot) -> float:
    return min(max(robot.goal.extension, MIN_LENGTH), MAX_LENGTH)
