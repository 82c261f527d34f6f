"""Core domain types: landmarks, joint-angle channels, series containers,
and annotation intervals.

Conventions used throughout the package:

* 3D points and vectors are numpy float arrays of shape (3,) in the source
  capture volume's units; angles are scale-invariant so the unit never
  matters.
* Angle samples are degrees stored as float64; a missing sample is NaN.
  No operation silently zero-fills a gap.
* All containers are value data: construct once, never mutate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from .errors import (
    EmptyChannel,
    InvalidForceValue,
    InvertedInterval,
    OverlappingIntervals,
    UnknownChannel,
)

# A 3D point/vector. Kept as a bare numpy array rather than a wrapper class;
# every consumer does vector arithmetic on it directly.
Vec3 = np.ndarray


def vec3(x: float, y: float, z: float) -> Vec3:
    return np.array([x, y, z], dtype=float)


class Landmark(str, Enum):
    """Anatomical landmarks consumed by the angle definitions.

    This is the minimal closed set the shipped definitions need; extra
    tracker keypoints are ignored at ingestion.
    """

    nose = "nose"
    neck = "neck"
    torso = "torso"
    pelvis = "pelvis"
    shoulder_l = "shoulder_l"
    shoulder_r = "shoulder_r"
    elbow_l = "elbow_l"
    elbow_r = "elbow_r"
    wrist_l = "wrist_l"
    wrist_r = "wrist_r"
    middle_knuckle_l = "middle_knuckle_l"
    middle_knuckle_r = "middle_knuckle_r"
    pinky_knuckle_l = "pinky_knuckle_l"
    pinky_knuckle_r = "pinky_knuckle_r"
    hip_l = "hip_l"
    hip_r = "hip_r"
    knee_l = "knee_l"
    knee_r = "knee_r"
    ankle_l = "ankle_l"
    ankle_r = "ankle_r"


class JointChannel(str, Enum):
    """The twenty joint-angle channels, named exactly as exported in the
    comparison statistics tables."""

    T1_head_neck_FE = "T1_head_neck_FE"
    T1_head_neck_AR = "T1_head_neck_AR"
    T1_head_neck_LB = "T1_head_neck_LB"
    lumbar_flexion = "lumbar_flexion"
    lumbar_rotation = "lumbar_rotation"
    lumbar_bending = "lumbar_bending"
    arm_flex_l = "arm_flex_l"
    arm_flex_r = "arm_flex_r"
    arm_add_l = "arm_add_l"
    arm_add_r = "arm_add_r"
    arm_rot_l = "arm_rot_l"
    arm_rot_r = "arm_rot_r"
    elbow_flex_l = "elbow_flex_l"
    elbow_flex_r = "elbow_flex_r"
    pro_sup_l = "pro_sup_l"
    pro_sup_r = "pro_sup_r"
    wrist_flex_l = "wrist_flex_l"
    wrist_flex_r = "wrist_flex_r"
    wrist_dev_l = "wrist_dev_l"
    wrist_dev_r = "wrist_dev_r"


#: Stable channel ordering used by reports and serializers.
CHANNEL_ORDER: tuple[JointChannel, ...] = tuple(JointChannel)


class Side(str, Enum):
    left = "left"
    right = "right"


def channel_side(channel: JointChannel) -> Side | None:
    """Side of a sided channel (suffix _l/_r); None for axial channels."""
    name = channel.value
    if name.endswith("_l"):
        return Side.left
    if name.endswith("_r"):
        return Side.right
    return None


@dataclass(frozen=True)
class KeypointFrame:
    """One timestamped frame of 3D anatomical landmark positions.

    ``incomplete`` is set by the parser when a landmark required by the
    requested channels is absent; such frames still participate in the
    pipeline, producing missing samples for the affected channels.
    """

    timestamp: float
    positions: Mapping[Landmark, Vec3]
    confidence: Mapping[Landmark, float] | None = None
    incomplete: bool = False

    def __post_init__(self):
        if not math.isfinite(self.timestamp) or self.timestamp < 0:
            raise ValueError(f"timestamp must be finite and >= 0, got {self.timestamp}")
        for lm, p in self.positions.items():
            if not np.all(np.isfinite(p)):
                raise ValueError(f"non-finite position for landmark {lm.value}")

    def has(self, *landmarks: Landmark) -> bool:
        return all(lm in self.positions for lm in landmarks)


@dataclass
class JointAngleSeries:
    """Multi-channel joint-angle time series on a uniform sample grid.

    Every channel array has the same length; missing samples are NaN.
    """

    sample_rate: float
    start_time: float
    channels: dict[JointChannel, np.ndarray]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.sample_rate > 0):
            raise ValueError(f"sample_rate must be > 0, got {self.sample_rate}")
        lengths = {len(v) for v in self.channels.values()}
        if len(lengths) > 1:
            raise ValueError(f"channel lengths differ: {sorted(lengths)}")
        self.channels = {
            ch: np.asarray(v, dtype=float) for ch, v in self.channels.items()
        }

    @property
    def length(self) -> int:
        if not self.channels:
            return 0
        return len(next(iter(self.channels.values())))

    @property
    def duration(self) -> float:
        n = self.length
        return 0.0 if n == 0 else (n - 1) / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        return self.start_time + np.arange(self.length) / self.sample_rate


@dataclass(frozen=True)
class ChannelSummary:
    mean: float
    std_dev: float
    min: float
    max: float


def channel_summary(series: JointAngleSeries, channel: JointChannel) -> ChannelSummary:
    """Mean, population standard deviation, and extrema over non-missing
    samples of one channel.

    Raises UnknownChannel if absent, EmptyChannel when every sample is
    missing.
    """
    if channel not in series.channels:
        raise UnknownChannel(f"channel {channel.value} not present in series")
    values = series.channels[channel]
    valid = values[~np.isnan(values)]
    if valid.size == 0:
        raise EmptyChannel(f"channel {channel.value} has no valid samples")
    return ChannelSummary(
        mean=float(np.mean(valid)),
        std_dev=float(np.std(valid)),
        min=float(np.min(valid)),
        max=float(np.max(valid)),
    )


# --- annotations -------------------------------------------------------------

#: Allowed value ranges for annotation fields.
_FORCE_RANGE = (0, 3)
_MUSCLE_RANGE = (0, 1)
_LEGS_RANGE = (1, 2)


@dataclass(frozen=True)
class AnnotationFlags:
    """Muscle/force/legs inputs active at one instant.

    Defaults are the neutral values used outside any annotated interval.
    """

    arm_muscle: int = 0
    arm_force: int = 0
    neck_muscle: int = 0
    neck_force: int = 0
    legs: int = 1


NEUTRAL_FLAGS = AnnotationFlags()


@dataclass(frozen=True)
class AnnotationInterval:
    t0: float
    t1: float
    arm_muscle: int = 0
    arm_force: int = 0
    neck_muscle: int = 0
    neck_force: int = 0
    legs: int = 1

    def __post_init__(self):
        if not (self.t0 < self.t1):
            raise InvertedInterval(f"interval [{self.t0}, {self.t1}] has t0 >= t1")
        for name, rng in (
            ("arm_muscle", _MUSCLE_RANGE),
            ("arm_force", _FORCE_RANGE),
            ("neck_muscle", _MUSCLE_RANGE),
            ("neck_force", _FORCE_RANGE),
            ("legs", _LEGS_RANGE),
        ):
            v = getattr(self, name)
            if not (isinstance(v, int) and rng[0] <= v <= rng[1]):
                raise InvalidForceValue(
                    f"{name}={v!r} outside allowed range {rng[0]}..{rng[1]}"
                )

    def flags(self) -> AnnotationFlags:
        return AnnotationFlags(
            arm_muscle=self.arm_muscle,
            arm_force=self.arm_force,
            neck_muscle=self.neck_muscle,
            neck_force=self.neck_force,
            legs=self.legs,
        )


@dataclass(frozen=True)
class AnnotationTrack:
    """Sorted, validated, non-overlapping annotation intervals."""

    intervals: tuple[AnnotationInterval, ...] = ()

    @classmethod
    def from_intervals(cls, intervals) -> "AnnotationTrack":
        ordered = tuple(sorted(intervals, key=lambda iv: iv.t0))
        for prev, nxt in zip(ordered, ordered[1:]):
            if nxt.t0 < prev.t1:
                raise OverlappingIntervals(
                    f"intervals [{prev.t0}, {prev.t1}] and [{nxt.t0}, {nxt.t1}] overlap"
                )
        return cls(intervals=ordered)

    def flags_at(self, t: float) -> AnnotationFlags:
        """Flags for timestamp t; each interval covers [t0, t1)."""
        for iv in self.intervals:
            if iv.t0 <= t < iv.t1:
                return iv.flags()
        return NEUTRAL_FLAGS


EMPTY_ANNOTATIONS = AnnotationTrack()
