"""Reel-based linear actuator model: open-loop extension with rate noise,
limit-switch recalibration at full retraction, the two-strip curvature
model, and planar collision footprints.

Lengths are millimeters. A unit's ``internal_estimate`` is what its
controller believes (driven by motor run time); ``length`` is ground
truth. The two diverge through a per-move rate error and re-converge only
when the limit switch fires at the fully retracted stop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .geometry import Point, Pose, Segment

MIN_LENGTH = 25.0
MAX_LENGTH = 200.0
EXTENSION_RATE = 33.0  # mm/s
BODY_RADIUS = 25.0
STRIP_HALF_WIDTH = 15.0
_EPS = 1e-9


class Mount(str, Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    CURVED = "curved"
    VOLUMETRIC = "volumetric"
    AREAL = "areal"


class MalformedArcError(ValueError):
    """Strip length difference too large for a valid arc."""


@dataclass(frozen=True)
class ActuatorNoise:
    """Open-loop extension error model.

    ``sigma`` is the mean absolute final-length error, in mm, for a 100 mm
    commanded travel. It maps onto a zero-mean normal rate multiplier via
    the half-normal mean, so error grows linearly with commanded travel.
    """

    sigma: float = 0.0
    enabled: bool = False

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError("sigma must be >= 0")

    @property
    def rate_sigma(self) -> float:
        return (self.sigma / 100.0) * math.sqrt(math.pi / 2.0)


@dataclass
class ActuatorUnit:
    mount: Mount = Mount.HORIZONTAL
    length: float = MIN_LENGTH
    commanded_length: float = MIN_LENGTH
    internal_estimate: float = MIN_LENGTH
    strip_delta: float = 0.0
    rate_error: float = 0.0  # multiplier drawn once per commanded move

    def __post_init__(self):
        for name in ("length", "commanded_length", "internal_estimate"):
            v = getattr(self, name)
            if not MIN_LENGTH - _EPS <= v <= MAX_LENGTH + _EPS:
                raise ValueError(f"{name}={v} outside [{MIN_LENGTH}, {MAX_LENGTH}]")

    @property
    def at_base(self) -> bool:
        return self.length <= MIN_LENGTH + _EPS and self.internal_estimate <= MIN_LENGTH + _EPS

    @property
    def move_complete(self) -> bool:
        if self.commanded_length <= MIN_LENGTH + _EPS:
            return self.at_base
        return abs(self.internal_estimate - self.commanded_length) <= _EPS


def command_length(
    unit: ActuatorUnit,
    target: float,
    noise: ActuatorNoise | None = None,
    rng=None,
    on_warning=None,
) -> float:
    """Set a new commanded length, clamped into range; draws this move's rate error.

    Returns the clamped command. Re-issuing the current command is a no-op.
    """
    clamped = min(max(target, MIN_LENGTH), MAX_LENGTH)
    if clamped != target and on_warning is not None:
        on_warning(f"actuator command {target:.1f} mm clamped to {clamped:.1f} mm")
    if abs(clamped - unit.commanded_length) <= _EPS:
        return clamped
    unit.commanded_length = clamped
    if noise is not None and noise.enabled and rng is not None:
        unit.rate_error = float(rng.normal(0.0, noise.rate_sigma))
        unit.rate_error = min(max(unit.rate_error, -0.5), 0.5)
    else:
        unit.rate_error = 0.0
    return clamped


def step_actuator(unit: ActuatorUnit, dt: float) -> ActuatorUnit:
    """Advance the unit by ``dt`` seconds.

    The estimate tracks the command at the nominal rate; true length moves
    by the same increments scaled by (1 + rate_error), so the final error
    is proportional to commanded travel. A retract-to-base command keeps
    the motor running until the limit switch fires, regardless of the
    estimate, which is what clears accumulated error.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    cmd = unit.commanded_length
    if cmd <= MIN_LENGTH + _EPS:
        if unit.at_base:
            return unit
        rate = EXTENSION_RATE * (1.0 + unit.rate_error)
        unit.internal_estimate = max(MIN_LENGTH, unit.internal_estimate - EXTENSION_RATE * dt)
        unit.length = unit.length - rate * dt
        if unit.length <= MIN_LENGTH + _EPS:
            trigger_limit_switch(unit)
        return unit
    delta = cmd - unit.internal_estimate
    if abs(delta) <= _EPS:
        return unit
    step = math.copysign(min(abs(delta), EXTENSION_RATE * dt), delta)
    unit.internal_estimate += step
    unit.length = min(max(unit.length + step * (1.0 + unit.rate_error), MIN_LENGTH), MAX_LENGTH)
    return unit


def trigger_limit_switch(unit: ActuatorUnit) -> ActuatorUnit:
    """Fully retracted stop: snap both true length and estimate to the base
    length, clearing any accumulated open-loop error. Idempotent."""
    unit.length = MIN_LENGTH
    unit.internal_estimate = MIN_LENGTH
    return unit


@dataclass(frozen=True)
class Arc:
    """Circular arc in the actuator's local frame (root at the origin,
    initial tangent along +x). ``sweep`` is signed; positive bends left."""

    center: Point
    radius: float
    sweep: float


def curved_geometry(
    base_length: float, strip_delta: float, width: float = 2.0 * STRIP_HALF_WIDTH
) -> Arc | Segment:
    """Concentric-arc model of a two-strip bending unit.

    Strip lengths are base +/- delta/2; the sweep is delta/width and the
    centreline radius base/|sweep|. A zero delta is the straight limit.
    """
    if abs(strip_delta) >= 2.0 * base_length:
        raise MalformedArcError(
            f"strip delta {strip_delta:.2f} mm >= twice the base length {base_length:.2f} mm"
        )
    l1 = base_length + strip_delta / 2.0
    l2 = base_length - strip_delta / 2.0
    for name, val in (("outer strip", l1), ("inner strip", l2)):
        if not MIN_LENGTH - _EPS <= val <= MAX_LENGTH + _EPS:
            raise ValueError(f"{name} length {val:.2f} mm outside [{MIN_LENGTH}, {MAX_LENGTH}]")
    if abs(strip_delta) <= _EPS:
        return Segment((0.0, 0.0), (base_length, 0.0))
    sweep = strip_delta / width
    radius = base_length / abs(sweep)
    center = (0.0, math.copysign(radius, sweep))
    return Arc(center=center, radius=radius, sweep=sweep)


@dataclass(frozen=True)
class Disc:
    center: Point
    radius: float


@dataclass(frozen=True)
class Capsule:
    a: Point
    b: Point
    radius: float


def footprint(pose: Pose, units: list[ActuatorUnit]) -> list[Disc | Capsule]:
    """Planar collision geometry of a robot at ``pose``.

    Body disc of radius 25 mm circumscribing the housing; horizontal and
    curved units add a capsule spanning the extension, centred on the body
    and aligned with the heading (curved strips use their chord direction).
    Vertical units have no planar footprint. Volumetric and areal mounts
    grow a disc whose radius tracks the synchronised extension.
    """
    shapes: list[Disc | Capsule] = [Disc(pose.position, BODY_RADIUS)]
    ux, uy = math.cos(pose.theta), math.sin(pose.theta)
    for unit in units:
        if unit.mount in (Mount.HORIZONTAL, Mount.CURVED):
            half = unit.length / 2.0
            a = (pose.x - half * ux, pose.y - half * uy)
            b = (pose.x + half * ux, pose.y + half * uy)
            shapes.append(Capsule(a, b, STRIP_HALF_WIDTH))
        elif unit.mount in (Mount.VOLUMETRIC, Mount.AREAL):
            shapes.append(Disc(pose.position, max(BODY_RADIUS, unit.length)))
    return shapes
