import math

import numpy as np
import pytest

from swarmshape.actuator import ActuatorUnit, MIN_LENGTH
from swarmshape.geometry import Pose, wrap_angle
from swarmshape.motion import (
    BehaviorPhase,
    NeighborDisc,
    PidState,
    WheelCommand,
    behavior_step,
    preferred_velocity,
    resolve_velocity,
    rotate_in_place,
    step_kinematics,
    track_velocity,
)
from swarmshape.engine import SimParams


# -- preferred velocity ---------------------------------------------------------


def test_preferred_velocity_at_goal_is_zero():
    assert preferred_velocity((10.0, 20.0), (10.0, 20.0), 170.0, 0.151) == (0.0, 0.0)


def test_preferred_velocity_far_goal_saturates():
    v = preferred_velocity((0.0, 0.0), (1000.0, 0.0), 170.0, 0.151)
    assert v == pytest.approx((170.0, 0.0))


def test_preferred_velocity_final_approach():
    v = preferred_velocity((0.0, 0.0), (10.0, 0.0), 170.0, 0.151)
    assert math.hypot(*v) == pytest.approx(10.0 / 0.151)  # ~66.2 mm/s
    assert v[1] == 0.0


# -- velocity resolution (half-plane solver) ------------------------------------


def test_resolve_no_neighbors_returns_preferred_exactly():
    pref = (123.0, -45.0)
    out = resolve_velocity((0.0, 0.0), (0.0, 0.0), 25.0, pref, [])
    assert out is pref


def test_resolve_head_on_antisymmetry():
    # two robots 300 mm apart driving at each other
    pref_a = (170.0, 0.0)
    pref_b = (-170.0, 0.0)
    nb_b = NeighborDisc(position=(300.0, 0.0), velocity=pref_b, radius=25.0)
    nb_a = NeighborDisc(position=(0.0, 0.0), velocity=pref_a, radius=25.0)
    va = resolve_velocity((0.0, 0.0), pref_a, 25.0, pref_a, [nb_b])
    vb = resolve_velocity((300.0, 0.0), pref_b, 25.0, pref_b, [nb_a])
    assert va[1] == pytest.approx(-vb[1], abs=1e-9)
    assert va[0] == pytest.approx(-vb[0], abs=1e-9)
    assert math.hypot(*va) <= 170.0 + 1e-9


def test_resolve_respects_speed_limit():
    rng = np.random.default_rng(5)
    for _ in range(50):
        pref = tuple(rng.uniform(-170, 170, 2))
        neighbors = [
            NeighborDisc(
                position=tuple(rng.uniform(-200, 200, 2)),
                velocity=tuple(rng.uniform(-100, 100, 2)),
                radius=25.0,
            )
            for _ in range(int(rng.integers(1, 5)))
        ]
        v = resolve_velocity((0.0, 0.0), (0.0, 0.0), 25.0, pref, neighbors, v_max=170.0)
        assert math.hypot(*v) <= 170.0 + 1e-6


def _half_planes_for(position, velocity, radius, neighbors, tau, dt):
    from swarmshape.motion import _neighbor_half_plane

    return [
        _neighbor_half_plane(position, velocity, radius, nb, 1.0 / tau, 1.0 / dt)
        for nb in neighbors
    ]


def test_resolve_matches_grid_search_oracle():
    """When the constraints are feasible, the solver's answer must match a
    dense grid search over the velocity disc (independent projection oracle)."""
    rng = np.random.default_rng(99)
    checked = 0
    for _ in range(40):
        pref = tuple(rng.uniform(-150, 150, 2))
        neighbors = [
            NeighborDisc(
                position=tuple(rng.uniform(-400, 400, 2)),
                velocity=tuple(rng.uniform(-80, 80, 2)),
                radius=30.0,
            )
            for _ in range(int(rng.integers(1, 4)))
        ]
        if any(math.hypot(*nb.position) < 2 * 30.0 for nb in neighbors):
            continue  # keep the oracle to the non-penetrating regime
        lines = _half_planes_for((0.0, 0.0), (0.0, 0.0), 30.0, neighbors, 2.0, 0.151)
        v = resolve_velocity(
            (0.0, 0.0), (0.0, 0.0), 30.0, pref, neighbors, v_max=170.0, time_horizon=2.0
        )

        def feasible(c):
            return all(
                (ln.direction[0] * (ln.point[1] - c[1]) - ln.direction[1] * (ln.point[0] - c[0]))
                <= 1e-7
                for ln in lines
            ) and math.hypot(*c) <= 170.0 + 1e-9

        # dense polar grid over the admissible disc
        rs = np.linspace(0, 170, 120)
        thetas = np.linspace(-math.pi, math.pi, 240, endpoint=False)
        best = None
        for r in rs:
            for th in thetas:
                c = (r * math.cos(th), r * math.sin(th))
                if feasible(c):
                    d = (c[0] - pref[0]) ** 2 + (c[1] - pref[1]) ** 2
                    if best is None or d < best[0]:
                        best = (d, c)
        if best is None:
            continue  # infeasible: least-penetration branch, not checked here
        checked += 1
        assert feasible(v), "solver's velocity must satisfy its own constraints"
        d_solver = (v[0] - pref[0]) ** 2 + (v[1] - pref[1]) ** 2
        # grid resolution limits the oracle's optimum; solver must not be worse
        assert d_solver <= best[0] + 2.0 * 170.0 * (170.0 / 119) + 25.0
    assert checked >= 20


def test_boundary_half_planes_block_outward_motion():
    from swarmshape.motion import boundary_half_planes

    # robot right up against the left wall
    lines = boundary_half_planes((28.0, 370.0), 28.0, 1150.0, 740.0, 2.0)
    v = resolve_velocity(
        (28.0, 370.0), (0.0, 0.0), 28.0, (-100.0, 0.0), [], boundary=lines
    )
    assert v[0] >= -1e-9  # cannot head further into the wall


# -- wheel tracking ---------------------------------------------------------------


def test_track_velocity_aligned():
    pid = PidState()
    cmd = track_velocity((100.0, 0.0), Pose(0, 0, 0.0), pid, 0.151)
    assert cmd.left == pytest.approx(100.0)
    assert cmd.right == pytest.approx(100.0)


def test_track_velocity_perpendicular_spins_in_place():
    pid = PidState()
    cmd = track_velocity((0.0, 100.0), Pose(0, 0, 0.0), pid, 0.151)
    assert cmd.left == pytest.approx(-cmd.right)
    assert cmd.left != 0.0


def test_track_velocity_zero_leaves_pid_untouched():
    pid = PidState()
    pid.integral = 0.5
    pid.prev_error = 0.1
    cmd = track_velocity((0.0, 0.0), Pose(0, 0, 0.0), pid, 0.151)
    assert cmd == WheelCommand(0.0, 0.0)
    assert pid.integral == 0.5
    assert pid.prev_error == 0.1


def test_track_velocity_respects_wheel_limits():
    pid = PidState()
    cmd = track_velocity((170.0, 0.0), Pose(0, 0, math.pi), pid, 0.151, wheel_max=170.0)
    assert max(abs(cmd.left), abs(cmd.right)) <= 170.0 + 1e-9


def test_rotate_in_place_has_no_forward_component():
    pid = PidState()
    cmd = rotate_in_place(math.pi / 2, Pose(0, 0, 0.0), pid, 0.151)
    assert cmd.left == pytest.approx(-cmd.right)


# -- kinematics -------------------------------------------------------------------


def euler_oracle(pose: Pose, cmd: WheelCommand, dt: float, substeps: int, track: float):
    x, y, th = pose.x, pose.y, pose.theta
    h = dt / substeps
    v = (cmd.left + cmd.right) / 2.0
    w = (cmd.right - cmd.left) / track
    for _ in range(substeps):
        x += v * math.cos(th) * h
        y += v * math.sin(th) * h
        th += w * h
    return x, y, wrap_angle(th)


def test_kinematics_straight():
    pose = step_kinematics(Pose(0, 0, 0), WheelCommand(100.0, 100.0), 1.0)
    assert (pose.x, pose.y, pose.theta) == pytest.approx((100.0, 0.0, 0.0))


def test_kinematics_spin_in_place():
    pose = step_kinematics(Pose(5, 5, 0), WheelCommand(-30.0, 30.0), 0.5, track_width=30.0)
    assert (pose.x, pose.y) == pytest.approx((5.0, 5.0))
    assert pose.theta == pytest.approx(wrap_angle(60.0 / 30.0 * 0.5))


def test_kinematics_single_wheel_arc():
    # right wheel only: arc about the left wheel, radius track/2
    track = 30.0
    pose = step_kinematics(Pose(0, 0, 0), WheelCommand(0.0, 50.0), 0.7, track_width=track)
    # centre of rotation is the left wheel at (0, -track/2) from... the robot
    # centre starts at origin heading +x, so the left wheel sits at (0, +...-)
    # verify against the independent fine-step integrator instead
    ox, oy, oth = euler_oracle(Pose(0, 0, 0), WheelCommand(0.0, 50.0), 0.7, 700_000, track)
    assert pose.x == pytest.approx(ox, abs=1e-3)
    assert pose.y == pytest.approx(oy, abs=1e-3)
    assert pose.theta == pytest.approx(oth, abs=1e-6)
    # and the turning radius is track/2 about the stationary left wheel
    left_wheel = (0.0 + math.sin(0.0) * track / 2, 0.0 - math.cos(0.0) * track / 2 + track / 2)
    # left wheel at heading 0 is at (0, +track/2)? heading +x, left is +y
    lw = (0.0, track / 2.0)
    d0 = math.hypot(0.0 - lw[0], 0.0 - lw[1])
    d1 = math.hypot(pose.x - lw[0], pose.y - lw[1])
    assert d0 == pytest.approx(track / 2.0)
    assert d1 == pytest.approx(track / 2.0, abs=1e-9)


def test_kinematics_matches_euler_for_random_commands():
    rng = np.random.default_rng(17)
    for _ in range(20):
        pose = Pose(rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(-3, 3))
        cmd = WheelCommand(float(rng.uniform(-170, 170)), float(rng.uniform(-170, 170)))
        exact = step_kinematics(pose, cmd, 1.0)
        ox, oy, oth = euler_oracle(pose, cmd, 1.0, 1_000_000, 30.0)
        assert exact.x == pytest.approx(ox, abs=1e-3)
        assert exact.y == pytest.approx(oy, abs=1e-3)


def test_kinematics_rejects_bad_dt():
    with pytest.raises(ValueError):
        step_kinematics(Pose(0, 0, 0), WheelCommand(0, 0), 0.0)


# -- behaviour machine ---------------------------------------------------------------


class FakeRobot:
    def __init__(self, pose, goal, units=None, phase=BehaviorPhase.IDLE):
        self.pose = pose
        self.goal = goal
        self.units = units if units is not None else [ActuatorUnit()]
        self.phase = phase


class FakeGoal:
    def __init__(self, pose, extension=MIN_LENGTH):
        self.pose = pose
        self.extension = extension


PARAMS = SimParams()


def test_behavior_no_goal_is_idle():
    robot = FakeRobot(Pose(0, 0, 0), None)
    assert behavior_step(robot, PARAMS).phase == BehaviorPhase.IDLE


def test_behavior_retracts_until_base():
    unit = ActuatorUnit(length=100.0, commanded_length=100.0, internal_estimate=100.0)
    robot = FakeRobot(Pose(100, 100, 0), FakeGoal(Pose(200, 100, 0)), units=[unit],
                      phase=BehaviorPhase.RETRACTING)
    d = behavior_step(robot, PARAMS)
    assert d.phase == BehaviorPhase.RETRACTING
    assert d.actuator_target == MIN_LENGTH


def test_behavior_thresholds_orienting_vs_transforming():
    goal = FakeGoal(Pose(100.0, 100.0, 0.0), extension=MIN_LENGTH)
    # position error 9 mm, heading error 20 degrees -> orienting
    robot = FakeRobot(Pose(109.0, 100.0, math.radians(20)), goal, phase=BehaviorPhase.NAVIGATING)
    assert behavior_step(robot, PARAMS).phase == BehaviorPhase.ORIENTING
    # position error 9 mm, heading error 4 degrees, extension incomplete -> transforming
    goal2 = FakeGoal(Pose(100.0, 100.0, 0.0), extension=150.0)
    robot2 = FakeRobot(Pose(109.0, 100.0, math.radians(4)), goal2, phase=BehaviorPhase.NAVIGATING)
    assert behavior_step(robot2, PARAMS).phase == BehaviorPhase.TRANSFORMING


def test_behavior_boundary_cases():
    goal = FakeGoal(Pose(0.0, 0.0, 0.0), extension=150.0)
    # exactly at the 10 mm threshold stays navigating (strict <)
    at = FakeRobot(Pose(10.0, 0.0, 0.0), goal, phase=BehaviorPhase.NAVIGATING)
    assert behavior_step(at, PARAMS).phase == BehaviorPhase.NAVIGATING
    just_in = FakeRobot(Pose(9.9, 0.0, 0.0), goal, phase=BehaviorPhase.NAVIGATING)
    assert behavior_step(just_in, PARAMS).phase >= BehaviorPhase.ORIENTING
    # heading exactly at 5 degrees keeps orienting
    at_ang = FakeRobot(Pose(0.0, 0.0, math.radians(5.0)), goal, phase=BehaviorPhase.ORIENTING)
    assert behavior_step(at_ang, PARAMS).phase == BehaviorPhase.ORIENTING
    in_ang = FakeRobot(Pose(0.0, 0.0, math.radians(4.9)), goal, phase=BehaviorPhase.ORIENTING)
    assert behavior_step(in_ang, PARAMS).phase == BehaviorPhase.TRANSFORMING


def test_behavior_transforming_until_extension_complete():
    goal = FakeGoal(Pose(0.0, 0.0, 0.0), extension=150.0)
    unit = ActuatorUnit(length=25.0, commanded_length=150.0, internal_estimate=80.0)
    robot = FakeRobot(Pose(0, 0, 0), goal, units=[unit], phase=BehaviorPhase.TRANSFORMING)
    d = behavior_step(robot, PARAMS)
    assert d.phase == BehaviorPhase.TRANSFORMING
    unit.internal_estimate = 150.0
    unit.length = 151.2  # true length may differ: completion is open loop
    assert behavior_step(robot, PARAMS).phase == BehaviorPhase.HOLDING


def test_behavior_phase_never_decreases_without_new_goal():
    goal = FakeGoal(Pose(0.0, 0.0, 0.0), extension=MIN_LENGTH)
    robot = FakeRobot(Pose(9.0, 0.0, 0.0), goal, phase=BehaviorPhase.ORIENTING)
    # position drifts outside the threshold but the phase holds
    robot.pose = Pose(15.0, 0.0, 0.0)
    assert behavior_step(robot, PARAMS).phase == BehaviorPhase.ORIENTING
