import math

import pytest
from hypothesis import given, strategies as st

from swarmshape.actuator import MAX_LENGTH, MIN_LENGTH, Mount
from swarmshape.geometry import Polyline, Pose, Segment
from swarmshape.shapes import (
    DrawnLines,
    Fence,
    FidelityWarning,
    NotReadyError,
    Rectangle,
    SineWave,
    SvgContour,
    TargetMode,
    compile_line_mode,
    compile_point_mode,
    compile_rectangle,
    compile_shape,
    compile_sine_wave,
    coverage_error,
    data_to_heights,
    sequence_keyframes,
)

SQUARE = Polyline(((0.0, 0.0), (100.0, 0.0), (100.0, 100.0), (0.0, 100.0)), closed=True)


def circle(cx=0.0, cy=0.0, r=100.0, n=256):
    return Polyline(
        tuple(
            (cx + r * math.cos(2 * math.pi * k / n), cy + r * math.sin(2 * math.pi * k / n))
            for k in range(n)
        ),
        closed=True,
    )


# -- line mode -----------------------------------------------------------------


def test_line_mode_square_four_edges():
    ts = compile_line_mode([SQUARE], 4)
    assert ts.mode == TargetMode.LINE
    assert len(ts.entries) == 4
    expected = [
        ((50.0, 0.0), 0.0),
        ((100.0, 50.0), math.pi / 2),
        ((50.0, 100.0), math.pi),
        ((0.0, 50.0), -math.pi / 2),
    ]
    for entry, (mid, theta) in zip(ts.entries, expected):
        assert (entry.pose.x, entry.pose.y) == pytest.approx(mid, abs=1e-9)
        assert entry.pose.theta == pytest.approx(theta)
        assert entry.extension == pytest.approx(100.0)
        assert entry.mount == Mount.HORIZONTAL


def test_line_mode_clamps_long_segment_with_warning():
    long_line = Polyline(((0.0, 0.0), (300.0, 0.0)))
    with pytest.warns(FidelityWarning):
        ts = compile_line_mode([long_line], 1)
    assert ts.entries[0].extension == MAX_LENGTH


def test_line_mode_short_segment():
    line = Polyline(((0.0, 0.0), (50.0, 0.0)))
    ts = compile_line_mode([line], 1)
    entry = ts.entries[0]
    assert (entry.pose.x, entry.pose.y) == pytest.approx((25.0, 0.0))
    assert entry.extension == pytest.approx(50.0)


def test_extensions_always_in_range():
    contours = [circle(r=400.0), Polyline(((0.0, 0.0), (3.0, 4.0)))]
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for n in (2, 5, 9, 30):
            ts = compile_line_mode(contours, n)
            for e in ts.entries:
                assert MIN_LENGTH <= e.extension <= MAX_LENGTH


# -- point mode -----------------------------------------------------------------


def test_point_mode_square_corners():
    ts = compile_point_mode([SQUARE], 4)
    pts = [(e.pose.x, e.pose.y) for e in ts.entries]
    assert pts == pytest.approx([(0, 0), (100, 0), (100, 100), (0, 100)], abs=1e-9)
    assert all(e.extension == MIN_LENGTH for e in ts.entries)


def test_point_mode_circle_antipodal():
    ts = compile_point_mode([circle(r=100)], 2)
    (a, b) = [(e.pose.x, e.pose.y) for e in ts.entries]
    assert math.dist(a, b) == pytest.approx(200.0, rel=1e-3)


def test_point_mode_resamples_beyond_vertices():
    line = Polyline(((0.0, 0.0), (100.0, 0.0)))
    ts = compile_point_mode([line], 7)
    assert len(ts.entries) == 7


def test_single_robot_degenerates_gracefully_on_closed_contour():
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        line_ts = compile_line_mode([SQUARE], 1)
    point_ts = compile_point_mode([SQUARE], 1)
    # line mode: the chord from the start corner to the half-perimeter point
    (entry,) = line_ts.entries
    assert (entry.pose.x, entry.pose.y) == pytest.approx((50.0, 50.0))
    # point mode: a single station at the walk start
    (p,) = point_ts.entries
    assert (p.pose.x, p.pose.y) == pytest.approx((0.0, 0.0))


# -- coverage error ----------------------------------------------------------------


def test_coverage_identity_is_zero():
    # rendered lines exactly on the reference square edges
    ts = compile_line_mode([SQUARE], 4)
    rendered = [(e.pose, e.extension, e.mount) for e in ts.entries]
    err = coverage_error(rendered, [SQUARE], TargetMode.LINE)
    assert err == pytest.approx(0.0, abs=1e-6)


def test_coverage_single_point_distance():
    reference = Polyline(((0.0, 0.0), (0.0, 1e-6 + 0.001)))  # about a point
    rendered = [(Pose(3.0, 4.0, 0.0), MIN_LENGTH, Mount.HORIZONTAL)]
    err = coverage_error(rendered, [reference], TargetMode.POINT)
    assert err == pytest.approx(5.0, abs=1e-2)


def test_coverage_requires_holding_robots():
    with pytest.raises(NotReadyError):
        coverage_error([], [SQUARE], TargetMode.LINE)


def test_line_mode_beats_point_mode_statically():
    """With robots placed exactly on their goals, chord rendering is closer
    to the contour than bare positions for every tested count."""
    contour = circle(r=300, n=512)
    for n in (10, 20, 40):
        line_ts = compile_line_mode([contour], n)
        point_ts = compile_point_mode([contour], n)
        line_err = coverage_error(
            [(e.pose, e.extension, e.mount) for e in line_ts.entries], [contour], TargetMode.LINE
        )
        point_err = coverage_error(
            [(e.pose, e.extension, e.mount) for e in point_ts.entries], [contour], TargetMode.POINT
        )
        assert line_err < point_err


# -- parametric presets ----------------------------------------------------------------


def test_sine_wave_formula():
    spec = SineWave(wavelength=600.0, count=7, amplitude=200.0, origin=(100.0, 370.0))
    ts = compile_sine_wave(spec)
    assert len(ts.entries) == 7
    for k, e in enumerate(ts.entries):
        x = 100.0 + 600.0 * k / 6
        assert e.pose.x == pytest.approx(x)
        expected = 25.0 + 175.0 * (1.0 + math.sin(2 * math.pi * (x - 100.0) / 600.0)) / 2.0
        assert e.extension == pytest.approx(expected)
        assert e.mount == Mount.VERTICAL


def test_sine_wave_validation():
    with pytest.raises(ValueError):
        SineWave(wavelength=600.0, count=7, amplitude=0.0)
    with pytest.raises(ValueError):
        SineWave(wavelength=-1.0, count=7)


def test_fence_hexagon():
    spec = Fence(center=(500.0, 400.0), radius=100.0, count=6, height=150.0)
    ts = compile_shape(spec, 6)
    assert len(ts.entries) == 6
    for k, e in enumerate(ts.entries):
        a = 2 * math.pi * k / 6
        assert e.pose.x == pytest.approx(500 + 100 * math.cos(a))
        assert e.pose.y == pytest.approx(400 + 100 * math.sin(a))
        # heading tangent to the circle
        radial = math.atan2(e.pose.y - 400.0, e.pose.x - 500.0)
        diff = abs((e.pose.theta - radial + math.pi) % (2 * math.pi) - math.pi)
        assert diff == pytest.approx(math.pi / 2, abs=1e-9)
        assert e.extension == 150.0
        assert e.mount == Mount.VERTICAL


def test_rectangle_extensions():
    ts = compile_rectangle(Rectangle(width=100.0, height=50.0, center=(0.0, 0.0)))
    assert [e.extension for e in ts.entries] == [100.0, 50.0, 100.0, 50.0]
    assert [(e.pose.x, e.pose.y) for e in ts.entries] == [
        (0.0, -25.0),
        (50.0, 0.0),
        (0.0, 25.0),
        (-50.0, 0.0),
    ]


# -- data map -----------------------------------------------------------------------


def test_data_to_heights_linear_map():
    anchors = [(0.0, 0.0), (10.0, 0.0), (20.0, 0.0)]
    ts = data_to_heights(anchors, [0.0, 50.0, 100.0])
    assert [e.extension for e in ts.entries] == pytest.approx([25.0, 112.5, 200.0])


def test_data_to_heights_single_max():
    ts = data_to_heights([(0.0, 0.0), (10.0, 0.0)], [1.0, 5.0])
    assert ts.entries[1].extension == pytest.approx(200.0)


def test_data_to_heights_flat_warns():
    with pytest.warns(FidelityWarning):
        ts = data_to_heights([(0.0, 0.0), (10.0, 0.0)], [3.0, 3.0])
    assert all(e.extension == 25.0 for e in ts.entries)


@given(
    st.lists(st.floats(-100.0, 100.0), min_size=2, max_size=8),
    st.floats(0.1, 10.0),
    st.floats(-50.0, 50.0),
)
def test_data_to_heights_affine_invariance(values, a, b):
    if max(values) - min(values) < 1e-6:
        return
    anchors = [(float(i) * 10.0, 0.0) for i in range(len(values))]
    t1 = data_to_heights(anchors, values)
    t2 = data_to_heights(anchors, [a * v + b for v in values])
    for e1, e2 in zip(t1.entries, t2.entries):
        assert e1.extension == pytest.approx(e2.extension, abs=1e-6)


# -- keyframes ----------------------------------------------------------------------


def test_keyframes_single_frame():
    plan = sequence_keyframes([SvgContour((SQUARE,))], 4, hold=2.0)
    assert len(plan.frames) == 1
    assert plan.hold_time == 2.0


def test_keyframes_error_names_frame():
    good = SvgContour((SQUARE,))
    bad = SvgContour((SQUARE, circle()))  # 2 contours cannot fit 1 robot
    with pytest.raises(ValueError) as err:
        sequence_keyframes([good, bad], 1, hold=1.0)
    assert "keyframe 1" in str(err.value)


def test_keyframes_empty_rejected():
    with pytest.raises(ValueError):
        sequence_keyframes([], 4, hold=1.0)


def test_drawn_lines_compile():
    spec = DrawnLines((Segment((0.0, 0.0), (100.0, 0.0)), Segment((0.0, 50.0), (100.0, 50.0))))
    ts = compile_shape(spec, 2)
    assert len(ts.entries) == 2
    assert ts.entries[0].extension == pytest.approx(100.0)
