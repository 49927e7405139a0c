"""User-input recognition and reactive shape editing.

Externally imposed marker motion is classified into place / move / orient /
pick-up events; robots the system is currently driving are never input
candidates, and brief tracking dropouts are distinguished from pick-ups by
an absence timeout. The reactive edits implemented here are the uniform
drag-to-scale refit and the sine wavelength edit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .actuator import MAX_LENGTH, MIN_LENGTH
from .geometry import Pose, Segment, wrap_angle
from .shapes import DrawnLines, SineWave, TargetEntry


class InputKind(str, Enum):
    PLACE = "place"
    MOVE = "move"
    ORIENT = "orient"
    PICK_UP = "pick_up"


@dataclass(frozen=True)
class InputEvent:
    kind: InputKind
    robot_id: int
    time: float
    before: Pose | None = None
    after: Pose | None = None


@dataclass
class _TrackState:
    pose: Pose
    last_seen: float
    reported_gone: bool = False


@dataclass
class InputClassifier:
    """Streams per-tick observations into user-input events.

    ``move_threshold`` (mm) and ``angle_threshold_deg`` separate user
    manipulation from tracking noise; ``absence_timeout`` (s) separates a
    pick-up from a transient tracking dropout.
    """

    move_threshold: float = 5.0
    angle_threshold_deg: float = 5.0
    absence_timeout: float = 0.5
    _tracks: dict[int, _TrackState] = field(default_factory=dict)
    _primed: bool = False

    def update(
        self,
        time: float,
        observed: dict[int, Pose],
        driven: set[int] | frozenset[int] = frozenset(),
    ) -> list[InputEvent]:
        """Consume one observation tick (robot id -> pose for every marker
        currently visible) and return the events it implies."""
        events: list[InputEvent] = []
        if not self._primed:
            # first observation establishes the baseline silently
            for rid, pose in observed.items():
                self._tracks[rid] = _TrackState(pose=pose, last_seen=time)
            self._primed = True
            return events

        ang_threshold = math.radians(self.angle_threshold_deg)
        for rid, pose in sorted(observed.items()):
            track = self._tracks.get(rid)
            if track is None or track.reported_gone:
                events.append(InputEvent(InputKind.PLACE, rid, time, after=pose))
                self._tracks[rid] = _TrackState(pose=pose, last_seen=time)
                continue
            if rid not in driven:
                displacement = track.pose.distance_to(pose)
                rotation = abs(wrap_angle(pose.theta - track.pose.theta))
                if displacement > self.move_threshold:
                    events.append(
                        InputEvent(InputKind.MOVE, rid, time, before=track.pose, after=pose)
                    )
                elif rotation > ang_threshold:
                    events.append(
                        InputEvent(InputKind.ORIENT, rid, time, before=track.pose, after=pose)
                    )
            track.pose = pose
            track.last_seen = time

        for rid, track in sorted(self._tracks.items()):
            if rid in observed or track.reported_gone:
                continue
            if time - track.last_seen >= self.absence_timeout:
                events.append(InputEvent(InputKind.PICK_UP, rid, time, before=track.pose))
                track.reported_gone = True
        return events

    def forget(self, robot_id: int) -> None:
        self._tracks.pop(robot_id, None)


def refit_on_drag(
    assigned: dict[int, TargetEntry], moved_id: int, new_pose: Pose
) -> DrawnLines | None:
    """Uniformly rescale a line formation after one robot is dragged.

    The scale factor is the dragged robot's new distance to the centroid of
    the un-moved goals divided by its old distance; every goal and extension
    rescales about that centroid, and the dragged robot's target becomes its
    new position. Returns None for degenerate drags (robot at the centroid)
    or when the moved robot has no goal.
    """
    if moved_id not in assigned or len(assigned) < 2:
        return None
    others = [e.pose for rid, e in assigned.items() if rid != moved_id]
    cx = sum(p.x for p in others) / len(others)
    cy = sum(p.y for p in others) / len(others)
    old = assigned[moved_id].pose
    old_dist = math.hypot(old.x - cx, old.y - cy)
    if old_dist < 1.0:
        return None
    factor = math.hypot(new_pose.x - cx, new_pose.y - cy) / old_dist
    segments = []
    for rid in sorted(assigned):
        entry = assigned[rid]
        if rid == moved_id:
            mx, my = new_pose.x, new_pose.y
        else:
            mx = cx + factor * (entry.pose.x - cx)
            my = cy + factor * (entry.pose.y - cy)
        length = min(max(entry.extension * factor, MIN_LENGTH), MAX_LENGTH)
        ux, uy = math.cos(entry.pose.theta), math.sin(entry.pose.theta)
        half = length / 2.0
        segments.append(Segment((mx - half * ux, my - half * uy), (mx + half * ux, my + half * uy)))
    return DrawnLines(tuple(segments))


def refit_sine(spec: SineWave, moved_end_x: float, moved_first_end: bool = False) -> SineWave | None:
    """Respace a sine wave after an end robot is dragged along x.

    The new wavelength is the span between the moved end and the fixed end;
    interior robots re-space evenly and the amplitude is untouched. Returns
    None when the new span is non-positive.
    """
    ox, oy = spec.origin
    if moved_first_end:
        span = (ox + spec.wavelength) - moved_end_x
        new_origin = (moved_end_x, oy)
    else:
        span = moved_end_x - ox
        new_origin = spec.origin
    if span <= 0.0:
        return None
    return SineWave(
        wavelength=span, count=spec.count, amplitude=spec.amplitude, origin=new_origin
    )
