"""Joint angles from 3D keypoints.

Each channel is the angle between two body-segment vectors, optionally
projected onto an anatomical plane and signed by a right-hand rule. The
anatomical frame is rebuilt per keypoint frame from the trunk and hip
landmarks:

* ``up``      — pelvis to torso, normalized;
* ``right``   — left hip to right hip, orthonormalized against ``up``;
* ``forward`` — ``up x right`` (out of the subject's chest).

The sagittal plane is normal to ``right``/``left``, the frontal plane to
``forward``/``backward``, and the transverse plane to ``up``/``down``. A
definition may instead rotate about its own first vector (``axis_a``),
measuring vector b around that axis against a body-axis reference; this is
how forearm pronation/supination is extracted.

Angles are pure functions of difference vectors, so a rigid motion or a
uniform scaling of an entire recording leaves every output unchanged.

Baseline handling: channels whose zero is only meaningful relative to the
start of the task (head inclination against the nose landmark, pelvis
orientation) are corrected against a baseline captured from the first
complete frames of the recording.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import (
    DegenerateProjection,
    DegenerateVector,
    NoCompleteFrames,
)
from .motion import (
    JointAngleSeries,
    JointChannel,
    KeypointFrame,
    Landmark,
    Vec3,
)

log = logging.getLogger(__name__)

#: Vectors (or in-plane projections) shorter than this are degenerate,
#: in source units.
EPSILON = 1e-9

#: Landmarks needed to build the per-frame anatomical axes.
AXES_LANDMARKS = frozenset(
    {Landmark.pelvis, Landmark.torso, Landmark.hip_l, Landmark.hip_r}
)

_PLANES = ("none", "sagittal", "frontal", "transverse", "axis_a")
_BASELINES = ("none", "subtract_initial", "initial_self", "initial_axes")
_PLANE_AXES = {
    "sagittal": ("left", "right"),
    "frontal": ("forward", "backward"),
    "transverse": ("up", "down"),
}


def vector_angle(a: Vec3, b: Vec3) -> float:
    """Unsigned angle between two vectors, degrees in [0, 180].

    Computed as atan2(|a x b|, a . b), which equals the arccos of the
    clamped cosine but stays well-conditioned at 0 and 180 degrees, where
    the arccos form amplifies rounding into microdegrees. Raises
    DegenerateVector when either norm <= EPSILON.
    """
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na <= EPSILON or nb <= EPSILON:
        raise DegenerateVector(f"vector norms {na:g}, {nb:g}")
    return math.degrees(
        math.atan2(float(np.linalg.norm(np.cross(a, b))), float(np.dot(a, b)))
    )


def signed_plane_angle(u: Vec3, v: Vec3, plane_normal: Vec3) -> float:
    """Signed angle from u to v after projecting both onto the plane
    orthogonal to plane_normal, degrees in (-180, 180].

    Positive when the rotation from u to v follows the right-hand rule
    about plane_normal. Raises DegenerateProjection when a projection is
    shorter than EPSILON.
    """
    nn = float(np.linalg.norm(plane_normal))
    if nn <= EPSILON:
        raise DegenerateVector(f"plane normal norm {nn:g}")
    n = plane_normal / nn
    up = u - np.dot(u, n) * n
    vp = v - np.dot(v, n) * n
    if float(np.linalg.norm(up)) <= EPSILON or float(np.linalg.norm(vp)) <= EPSILON:
        raise DegenerateProjection("projection onto plane is degenerate")
    angle = math.degrees(math.atan2(float(np.dot(n, np.cross(up, vp))),
                                    float(np.dot(up, vp))))
    if angle <= -180.0:
        angle = 180.0
    return angle


# --- anatomical axes ----------------------------------------------------------


@dataclass(frozen=True)
class BodyAxes:
    up: Vec3
    right: Vec3
    forward: Vec3

    def named(self, name: str) -> Vec3:
        if name == "up":
            return self.up
        if name == "down":
            return -self.up
        if name == "right":
            return self.right
        if name == "left":
            return -self.right
        if name == "forward":
            return self.forward
        if name == "backward":
            return -self.forward
        raise ValueError(f"unknown body axis {name!r}")


def body_axes(frame: KeypointFrame) -> BodyAxes | None:
    """Orthonormal anatomical axes for a frame, or None when the trunk/hip
    landmarks are missing or degenerate."""
    if not frame.has(*AXES_LANDMARKS):
        return None
    pos = frame.positions
    up = pos[Landmark.torso] - pos[Landmark.pelvis]
    nu = float(np.linalg.norm(up))
    if nu <= EPSILON:
        return None
    up = up / nu
    lat = pos[Landmark.hip_r] - pos[Landmark.hip_l]
    lat = lat - np.dot(lat, up) * up
    nl = float(np.linalg.norm(lat))
    if nl <= EPSILON:
        return None
    right = lat / nl
    return BodyAxes(up=up, right=right, forward=np.cross(up, right))


# --- angle definitions ----------------------------------------------------------

# A point reference is a landmark, or a pair of landmarks meaning their
# midpoint.
PointRef = tuple[Landmark, ...]


@dataclass(frozen=True)
class AngleDefinition:
    channel: JointChannel
    vector_a: tuple[PointRef, PointRef] | None  # None: reference from baseline/axis
    vector_b: tuple[PointRef, PointRef]
    plane: str = "none"
    signed: bool = False
    sign_axis: str | None = None
    axis_a_ref: str | None = None  # reference axis when plane == "axis_a"
    baseline: str = "none"

    def __post_init__(self):
        if self.plane not in _PLANES:
            raise ValueError(f"{self.channel.value}: unknown plane {self.plane!r}")
        if self.baseline not in _BASELINES:
            raise ValueError(f"{self.channel.value}: unknown baseline {self.baseline!r}")
        if self.plane == "none" and self.signed:
            raise ValueError(f"{self.channel.value}: unprojected angles cannot be signed")
        if self.plane in _PLANE_AXES:
            if self.sign_axis not in _PLANE_AXES[self.plane]:
                raise ValueError(
                    f"{self.channel.value}: sign_axis {self.sign_axis!r} does not "
                    f"orient the {self.plane} plane"
                )
        if self.plane == "axis_a" and not self.axis_a_ref:
            raise ValueError(f"{self.channel.value}: axis_a needs a reference axis")

    def landmarks(self) -> frozenset[Landmark]:
        out: set[Landmark] = set()
        for vec in (self.vector_a, self.vector_b):
            if isinstance(vec, tuple):
                for point in vec:
                    out.update(point)
        if self.plane != "none" or self.vector_a is None or self.baseline != "none":
            out.update(AXES_LANDMARKS)
        return frozenset(out)


def _parse_point(raw) -> PointRef:
    if isinstance(raw, str):
        return (Landmark(raw),)
    if isinstance(raw, (list, tuple)) and all(isinstance(x, str) for x in raw):
        return tuple(Landmark(x) for x in raw)
    raise ValueError(f"bad point reference {raw!r}")


def _parse_vector(raw):
    """A vector spec: null, {'axis': name}, or [point, point]."""
    if raw is None:
        return None, None
    if isinstance(raw, dict):
        return None, raw["axis"]
    if isinstance(raw, (list, tuple)) and len(raw) == 2:
        return (_parse_point(raw[0]), _parse_point(raw[1])), None
    raise ValueError(f"bad vector spec {raw!r}")


def parse_angle_definitions(raw: dict) -> list[AngleDefinition]:
    defs = []
    for entry in raw["definitions"]:
        channel = JointChannel(entry["channel"])
        vec_a, axis_a = _parse_vector(entry.get("a"))
        vec_b, axis_b = _parse_vector(entry["b"])
        if vec_b is None:
            raise ValueError(f"{channel.value}: vector b must be a point pair")
        plane = entry.get("plane", "none")
        sign_axis = entry.get("sign_axis")
        if plane == "axis_a":
            defn = AngleDefinition(
                channel=channel,
                vector_a=vec_a,
                vector_b=vec_b,
                plane=plane,
                signed=bool(entry.get("signed", False)),
                sign_axis=None,
                axis_a_ref=sign_axis,
                baseline=entry.get("baseline", "none"),
            )
        else:
            # A body-axis reference vector ('a': {'axis': ...}) keeps
            # vector_a empty; the axis name rides along in axis_a_ref.
            defn = AngleDefinition(
                channel=channel,
                vector_a=vec_a,
                vector_b=vec_b,
                plane=plane,
                signed=bool(entry.get("signed", False)),
                sign_axis=sign_axis,
                axis_a_ref=axis_a,
                baseline=entry.get("baseline", "none"),
            )
        defs.append(defn)
    return defs


def load_angle_definitions(path: str | None = None) -> list[AngleDefinition]:
    """Load angle definitions from a JSON file, or the shipped defaults."""
    if path is None:
        raw = json.loads(
            resources.files("ergokit.data").joinpath("angle_definitions.json").read_text()
        )
    else:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    return parse_angle_definitions(raw)


_DEFAULT_DEFS: list[AngleDefinition] | None = None


def default_angle_definitions() -> list[AngleDefinition]:
    global _DEFAULT_DEFS
    if _DEFAULT_DEFS is None:
        _DEFAULT_DEFS = load_angle_definitions()
    return _DEFAULT_DEFS


def landmarks_required(defs) -> frozenset[Landmark]:
    out: set[Landmark] = set()
    for d in defs:
        out.update(d.landmarks())
    return frozenset(out)


def default_required_landmarks() -> frozenset[Landmark]:
    return landmarks_required(default_angle_definitions())


# --- baseline -------------------------------------------------------------------


@dataclass(frozen=True)
class Baseline:
    """Start-of-task references captured from the first complete frames.

    ``inclination`` is the mean raw head inclination subtracted from neck
    flexion/extension; ``axes`` and ``directions`` serve the channels
    measured against start-of-task orientation.
    """

    inclination: float
    axes: BodyAxes
    inclinations: dict[JointChannel, float]
    directions: dict[JointChannel, Vec3]


def _point_vec(frame: KeypointFrame, point: PointRef) -> Vec3 | None:
    acc = np.zeros(3)
    for lm in point:
        if lm not in frame.positions:
            return None
        acc = acc + frame.positions[lm]
    return acc / len(point)


def _segment(frame: KeypointFrame, vec: tuple[PointRef, PointRef]) -> Vec3 | None:
    p0 = _point_vec(frame, vec[0])
    p1 = _point_vec(frame, vec[1])
    if p0 is None or p1 is None:
        return None
    return p1 - p0


def _raw_angle(defn: AngleDefinition, frame: KeypointFrame,
               axes: BodyAxes | None, baseline: Baseline | None) -> float:
    """One channel for one frame; raises Degenerate* or KeyError-like
    ValueError when inputs are unavailable."""
    b = _segment(frame, defn.vector_b)
    if b is None:
        raise DegenerateVector(f"{defn.channel.value}: landmarks missing")

    if defn.baseline in ("initial_self", "initial_axes"):
        if baseline is None:
            raise DegenerateVector(f"{defn.channel.value}: baseline required")
        ref_axes = baseline.axes
    else:
        ref_axes = axes

    if defn.plane == "none":
        a = _segment(frame, defn.vector_a) if defn.vector_a else None
        if a is None:
            raise DegenerateVector(f"{defn.channel.value}: landmarks missing")
        return vector_angle(a, b)

    if ref_axes is None:
        raise DegenerateVector(f"{defn.channel.value}: anatomical axes unavailable")

    if defn.plane == "axis_a":
        axis = _segment(frame, defn.vector_a) if defn.vector_a else None
        if axis is None:
            raise DegenerateVector(f"{defn.channel.value}: landmarks missing")
        reference = ref_axes.named(defn.axis_a_ref)
        angle = signed_plane_angle(reference, b, axis)
        return angle if defn.signed else abs(angle)

    normal = ref_axes.named(defn.sign_axis)
    if defn.baseline == "initial_self":
        a = baseline.directions.get(defn.channel)
        if a is None:
            raise DegenerateVector(f"{defn.channel.value}: baseline direction missing")
    elif defn.vector_a is not None:
        a = _segment(frame, defn.vector_a)
        if a is None:
            raise DegenerateVector(f"{defn.channel.value}: landmarks missing")
    elif defn.axis_a_ref is not None:
        a = ref_axes.named(defn.axis_a_ref)
    else:
        raise DegenerateVector(f"{defn.channel.value}: no reference vector")

    angle = signed_plane_angle(a, b, normal)
    return angle if defn.signed else abs(angle)


#: Default number of complete frames used to capture the baseline
#: (0.5 s at 30 fps).
DEFAULT_BASELINE_WINDOW = 15


def neck_baseline(frames, defs=None, window: int = DEFAULT_BASELINE_WINDOW) -> Baseline:
    """Capture the start-of-task baseline from the first complete frames.

    A frame is complete here when it carries the axes landmarks and every
    landmark used by a baseline-dependent definition. Up to ``window``
    leading frames are scanned; raises NoCompleteFrames when none qualify.
    """
    if defs is None:
        defs = default_angle_definitions()
    baseline_defs = [d for d in defs if d.baseline != "none"]
    needed: set[Landmark] = set(AXES_LANDMARKS)
    for d in baseline_defs:
        needed.update(d.landmarks())

    window_frames = list(frames)[: max(window, 1)]
    complete = [f for f in window_frames if f.has(*needed)]
    complete = [f for f in complete if body_axes(f) is not None]
    if not complete:
        raise NoCompleteFrames(
            f"no complete frame in the first {len(window_frames)} frames"
        )

    axes_list = [body_axes(f) for f in complete]
    up = _mean_direction([ax.up for ax in axes_list])
    right = _mean_direction([ax.right for ax in axes_list])
    right = right - np.dot(right, up) * up
    right = right / np.linalg.norm(right)
    axes = BodyAxes(up=up, right=right, forward=np.cross(up, right))

    inclinations: dict[JointChannel, float] = {}
    directions: dict[JointChannel, Vec3] = {}
    for d in baseline_defs:
        if d.baseline == "subtract_initial":
            values = []
            for f, ax in zip(complete, axes_list):
                values.append(_raw_angle(d, f, ax, None))
            inclinations[d.channel] = float(np.mean(values))
        elif d.baseline == "initial_self":
            segs = []
            for f in complete:
                seg = _segment(f, d.vector_b)
                segs.append(seg / np.linalg.norm(seg))
            directions[d.channel] = _mean_direction(segs)

    neck_incl = inclinations.get(JointChannel.T1_head_neck_FE, 0.0)
    return Baseline(
        inclination=neck_incl,
        axes=axes,
        inclinations=inclinations,
        directions=directions,
    )


def _mean_direction(vectors) -> Vec3:
    m = np.mean(np.stack(vectors), axis=0)
    return m / np.linalg.norm(m)


# --- per-frame and per-series computation -----------------------------------------


def compute_joint_angles(frame: KeypointFrame, defs=None,
                         baseline: Baseline | None = None) -> dict[JointChannel, float]:
    """All computable channels for one frame.

    Channels whose landmarks are missing or whose geometry is degenerate are
    absent from the result, never zeroed. Neck flexion/extension has the
    baseline inclination subtracted when a baseline is given.
    """
    if defs is None:
        defs = default_angle_definitions()
    axes = body_axes(frame)
    out: dict[JointChannel, float] = {}
    for d in defs:
        try:
            value = _raw_angle(d, frame, axes, baseline)
        except (DegenerateVector, DegenerateProjection) as exc:
            log.debug("frame %.3f: %s", frame.timestamp, exc)
            continue
        if d.baseline == "subtract_initial" and baseline is not None:
            value -= baseline.inclinations.get(d.channel, 0.0)
        out[d.channel] = value
    return out


def compute_angle_series(frames, defs=None,
                         baseline_window: int = DEFAULT_BASELINE_WINDOW,
                         sample_rate: float | None = None) -> JointAngleSeries:
    """Apply compute_joint_angles across a recording.

    The sample rate is inferred from the median frame spacing unless given.
    Channels a frame cannot produce become NaN samples for that frame.
    """
    frames = list(frames)
    if not frames:
        raise NoCompleteFrames("empty recording")
    if defs is None:
        defs = default_angle_definitions()
    baseline = neck_baseline(frames, defs, window=baseline_window)

    if sample_rate is None:
        if len(frames) < 2:
            raise ValueError("cannot infer sample rate from a single frame")
        spacing = float(np.median(np.diff([f.timestamp for f in frames])))
        if spacing <= 0:
            raise ValueError("frame timestamps do not advance")
        sample_rate = 1.0 / spacing

    n = len(frames)
    channels = {d.channel: np.full(n, np.nan) for d in defs}
    dropped = {d.channel: 0 for d in defs}
    for i, frame in enumerate(frames):
        values = compute_joint_angles(frame, defs, baseline)
        for d in defs:
            if d.channel in values:
                channels[d.channel][i] = values[d.channel]
            else:
                dropped[d.channel] += 1
    for ch, count in dropped.items():
        if count:
            log.info("channel %s: %d of %d frames missing", ch.value, count, n)

    return JointAngleSeries(
        sample_rate=sample_rate,
        start_time=frames[0].timestamp,
        channels=channels,
        meta={"source": "keypoints", "frames": n},
    )
