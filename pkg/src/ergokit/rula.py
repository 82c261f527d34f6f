"""Data-driven RULA scoring.

Every number that decides a score lives in the configuration (the shipped
default is ``data/rula_default.json``), never in code: per-joint angle
ranges with their primary scores under the ``range`` key, posture
adjustments under ``position``, the three lookup tables, and the risk-band
cut points. Changing a threshold is a config edit.

Scoring order per frame and side: range score per joint, position
adjustments (clamped to each joint's table-input range), Table A, then
score C = table A + arm muscle + arm force. Shared: neck/trunk range
scores, adjustments, Table B with the annotated legs score, then
score D = table B + neck muscle + neck force. Scores C and D are clamped
to 1..9 before the final Table C lookup. The combined frame score is the
worse (max) of the two sides.

Range intervals are half-open [lo, hi); the first interval is open below
and the last closed above, so every finite angle scores exactly once.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Mapping

import numpy as np

from .errors import (
    ConfigError,
    EmptyTimeline,
    IncompleteFrame,
    OutOfRangeIndex,
    UnknownJoint,
)
from .motion import (
    AnnotationFlags,
    AnnotationTrack,
    EMPTY_ANNOTATIONS,
    JointAngleSeries,
    JointChannel,
    NEUTRAL_FLAGS,
    Side,
)


class RiskBand(str, Enum):
    negligible = "negligible"
    low = "low"
    medium = "medium"
    very_high = "very_high"


#: Joints scored per side vs shared, with their table-input score ranges.
SIDED_JOINTS = ("arm", "forearm", "wrist", "wrist_twist")
AXIAL_JOINTS = ("neck", "trunk")
JOINT_SCORE_RANGE = {
    "arm": (1, 6),
    "forearm": (1, 3),
    "wrist": (1, 4),
    "wrist_twist": (1, 2),
    "neck": (1, 6),
    "trunk": (1, 6),
    "legs": (1, 2),
}

_PREDICATES = ("above", "below", "outside")


@dataclass(frozen=True)
class RangeRule:
    joint: str
    channels: dict[str, JointChannel]  # keys: "left"/"right" or "axial"
    intervals: tuple[tuple[float, float, int], ...]  # (lo, hi, score)

    def min_score(self) -> int:
        return min(score for _, _, score in self.intervals)


@dataclass(frozen=True)
class PositionRule:
    joint: str
    channel: JointChannel
    predicate: str
    threshold: float
    adjust: int
    side: Side | None = None
    reason: str = ""

    def triggered(self, angle: float) -> bool:
        if self.predicate == "above":
            return angle > self.threshold
        if self.predicate == "below":
            return angle < self.threshold
        return abs(angle) > self.threshold  # outside


@dataclass(frozen=True)
class RulaConfig:
    range_rules: dict[str, RangeRule]
    position_rules: tuple[PositionRule, ...]
    table_a_values: np.ndarray  # shape (6, 3, 4, 2)
    table_b_values: np.ndarray  # shape (6, 6, 2)
    table_c_values: np.ndarray  # shape (9, 9)
    bands: dict[RiskBand, tuple[int, int]]
    checksum: str
    raw: dict = field(repr=False, default_factory=dict)


# --- config loading and validation --------------------------------------------


def config_checksum(raw: dict) -> str:
    """Checksum of the canonicalized config, embedded in every report."""
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def table_checksums(raw: dict) -> dict[str, str]:
    out = {}
    for name in ("table_a", "table_b", "table_c"):
        canonical = json.dumps(raw.get(name), separators=(",", ":"))
        out[name] = hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]
    return out


def _validate_table(raw: dict, name: str, shape: tuple[int, ...],
                    bounds: tuple[int, int], axis_names: tuple[str, ...],
                    problems: list[str]) -> None:
    table = raw.get(name)

    def walk(node, dims, coord):
        if not dims:
            where = "][".join(f"{n}={c}" for n, c in zip(axis_names, coord))
            if not isinstance(node, int) or isinstance(node, bool):
                problems.append(f"{name}[{where}]: cell missing or not an integer")
            elif not (bounds[0] <= node <= bounds[1]):
                problems.append(
                    f"{name}[{where}]: value {node} outside {bounds[0]}..{bounds[1]}"
                )
            return
        if not isinstance(node, list) or len(node) != dims[0]:
            where = "][".join(f"{n}={c}" for n, c in zip(axis_names, coord))
            prefix = f"{name}[{where}]" if coord else name
            found = len(node) if isinstance(node, list) else "non-list"
            problems.append(f"{prefix}: expected {dims[0]} entries, found {found}")
            return
        for i, child in enumerate(node, start=1):
            walk(child, dims[1:], coord + (i,))

    walk(table, list(shape), ())


def _validate_range_section(raw: dict, problems: list[str]) -> None:
    section = raw.get("range")
    if not isinstance(section, dict):
        problems.append("range: section missing or not an object")
        return
    for joint in SIDED_JOINTS + AXIAL_JOINTS:
        if joint not in section:
            problems.append(f"range[{joint}]: rule missing")
    for joint, rule in section.items():
        if joint not in JOINT_SCORE_RANGE or joint == "legs":
            problems.append(f"range[{joint}]: unknown joint")
            continue
        channels = rule.get("channels", {})
        expected = {"left", "right"} if joint in SIDED_JOINTS else {"axial"}
        if set(channels) != expected:
            problems.append(
                f"range[{joint}]: channels must be exactly {sorted(expected)}"
            )
        for key, ch in channels.items():
            try:
                JointChannel(ch)
            except ValueError:
                problems.append(f"range[{joint}]: unknown channel {ch!r} for {key}")
        intervals = rule.get("intervals")
        if not isinstance(intervals, list) or not intervals:
            problems.append(f"range[{joint}]: intervals missing")
            continue
        parsed = []
        for entry in intervals:
            if (not isinstance(entry, list) or len(entry) != 3
                    or not isinstance(entry[2], int) or entry[2] < 1):
                problems.append(f"range[{joint}]: bad interval {entry!r}")
                continue
            lo = -math.inf if entry[0] is None else float(entry[0])
            hi = math.inf if entry[1] is None else float(entry[1])
            if not lo < hi:
                problems.append(f"range[{joint}]: empty interval [{entry[0]}, {entry[1]}]")
                continue
            parsed.append((lo, hi, entry[2]))
        parsed.sort(key=lambda iv: iv[0])
        if parsed:
            if parsed[0][0] != -math.inf:
                problems.append(f"range[{joint}]: lowest interval must be open below")
            if parsed[-1][1] != math.inf:
                problems.append(f"range[{joint}]: highest interval must be open above")
        for prev, nxt in zip(parsed, parsed[1:]):
            if nxt[0] < prev[1]:
                problems.append(
                    f"range[{joint}]: intervals [{prev[0]}, {prev[1]}] and "
                    f"[{nxt[0]}, {nxt[1]}] overlap"
                )
            elif nxt[0] > prev[1]:
                problems.append(
                    f"range[{joint}]: gap between {prev[1]} and {nxt[0]}"
                )


def _validate_position_section(raw: dict, problems: list[str]) -> None:
    section = raw.get("position")
    if not isinstance(section, list):
        problems.append("position: section missing or not a list")
        return
    for i, rule in enumerate(section):
        where = f"position[{i}]"
        joint = rule.get("joint")
        if joint not in JOINT_SCORE_RANGE or joint == "legs":
            problems.append(f"{where}: unknown joint {joint!r}")
            continue
        if joint in SIDED_JOINTS:
            if rule.get("side") not in ("left", "right"):
                problems.append(f"{where}: sided joint {joint} needs side left/right")
        elif rule.get("side") is not None:
            problems.append(f"{where}: axial joint {joint} cannot take a side")
        try:
            JointChannel(rule.get("channel"))
        except ValueError:
            problems.append(f"{where}: unknown channel {rule.get('channel')!r}")
        if rule.get("predicate") not in _PREDICATES:
            problems.append(f"{where}: predicate must be one of {_PREDICATES}")
        threshold = rule.get("threshold")
        if not isinstance(threshold, (int, float)) or not math.isfinite(threshold):
            problems.append(f"{where}: threshold must be finite")
        adjust = rule.get("adjust")
        if not isinstance(adjust, int) or adjust == 0 or abs(adjust) > 3:
            problems.append(f"{where}: adjust must be a small nonzero integer")


def _validate_bands(raw: dict, problems: list[str]) -> None:
    bands = raw.get("bands")
    if not isinstance(bands, dict):
        problems.append("bands: section missing or not an object")
        return
    expected = {b.value for b in RiskBand}
    if set(bands) != expected:
        problems.append(f"bands: names must be exactly {sorted(expected)}")
        return
    covered = {}
    for name, rng in bands.items():
        if (not isinstance(rng, list) or len(rng) != 2
                or not all(isinstance(v, int) for v in rng) or rng[0] > rng[1]):
            problems.append(f"bands[{name}]: must be [lo, hi] with lo <= hi")
            continue
        for score in range(rng[0], rng[1] + 1):
            if score in covered:
                problems.append(
                    f"bands[{name}]: score {score} already assigned to {covered[score]}"
                )
            covered[score] = name
    missing = [s for s in range(1, 8) if s not in covered]
    if missing:
        problems.append(f"bands: scores {missing} not assigned to any band")
    extra = [s for s in covered if not 1 <= s <= 7]
    if extra:
        problems.append(f"bands: scores {sorted(extra)} outside 1..7")


def validate_rula_config(raw: dict) -> list[str]:
    """All invariant violations in a raw config dict; empty means valid."""
    problems: list[str] = []
    _validate_table(raw, "table_a", (6, 3, 4, 2), (1, 9),
                    ("arm", "forearm", "wrist", "twist"), problems)
    _validate_table(raw, "table_b", (6, 6, 2), (1, 9),
                    ("neck", "trunk", "legs"), problems)
    _validate_table(raw, "table_c", (9, 9), (1, 7),
                    ("score_c", "score_d"), problems)
    _validate_range_section(raw, problems)
    _validate_position_section(raw, problems)
    _validate_bands(raw, problems)
    return problems


def config_from_dict(raw: dict) -> RulaConfig:
    """Validate and build an immutable RulaConfig; raises ConfigError."""
    problems = validate_rula_config(raw)
    if problems:
        raise ConfigError(problems)

    range_rules = {}
    for joint, rule in raw["range"].items():
        intervals = tuple(
            (-math.inf if lo is None else float(lo),
             math.inf if hi is None else float(hi),
             int(score))
            for lo, hi, score in rule["intervals"]
        )
        range_rules[joint] = RangeRule(
            joint=joint,
            channels={k: JointChannel(v) for k, v in rule["channels"].items()},
            intervals=tuple(sorted(intervals, key=lambda iv: iv[0])),
        )

    position_rules = tuple(
        PositionRule(
            joint=r["joint"],
            channel=JointChannel(r["channel"]),
            predicate=r["predicate"],
            threshold=float(r["threshold"]),
            adjust=int(r["adjust"]),
            side=Side(r["side"]) if r.get("side") else None,
            reason=r.get("reason", ""),
        )
        for r in raw["position"]
    )

    bands = {
        RiskBand(name): (int(rng[0]), int(rng[1]))
        for name, rng in raw["bands"].items()
    }

    return RulaConfig(
        range_rules=range_rules,
        position_rules=position_rules,
        table_a_values=np.asarray(raw["table_a"], dtype=int),
        table_b_values=np.asarray(raw["table_b"], dtype=int),
        table_c_values=np.asarray(raw["table_c"], dtype=int),
        bands=bands,
        checksum=config_checksum(raw),
        raw=raw,
    )


def load_rula_config(path: str | None = None) -> RulaConfig:
    """Load a scoring config from a JSON file, or the shipped default."""
    if path is None:
        raw = json.loads(
            resources.files("ergokit.data").joinpath("rula_default.json").read_text()
        )
    else:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    return config_from_dict(raw)


_DEFAULT_CONFIG: RulaConfig | None = None


def default_config() -> RulaConfig:
    global _DEFAULT_CONFIG
    if _DEFAULT_CONFIG is None:
        _DEFAULT_CONFIG = load_rula_config()
    return _DEFAULT_CONFIG


# --- table lookups --------------------------------------------------------------


def table_a(arm: int, forearm: int, wrist: int, twist: int,
            config: RulaConfig | None = None) -> int:
    config = config or default_config()
    if not (1 <= arm <= 6 and 1 <= forearm <= 3 and 1 <= wrist <= 4 and 1 <= twist <= 2):
        raise OutOfRangeIndex(
            f"table_a({arm}, {forearm}, {wrist}, {twist}) outside 1..6/1..3/1..4/1..2"
        )
    return int(config.table_a_values[arm - 1, forearm - 1, wrist - 1, twist - 1])


def table_b(neck: int, trunk: int, legs: int,
            config: RulaConfig | None = None) -> int:
    config = config or default_config()
    if not (1 <= neck <= 6 and 1 <= trunk <= 6 and 1 <= legs <= 2):
        raise OutOfRangeIndex(
            f"table_b({neck}, {trunk}, {legs}) outside 1..6/1..6/1..2"
        )
    return int(config.table_b_values[neck - 1, trunk - 1, legs - 1])


def table_c(score_c: int, score_d: int, config: RulaConfig | None = None) -> int:
    """Final lookup; inputs are clamped to 1..9, so it is total."""
    config = config or default_config()
    c = min(9, max(1, int(score_c)))
    d = min(9, max(1, int(score_d)))
    return int(config.table_c_values[c - 1, d - 1])


# --- per-joint scoring ------------------------------------------------------------


def score_range(joint: str, angle: float, config: RulaConfig | None = None) -> int:
    """Primary score of the unique interval containing ``angle``."""
    config = config or default_config()
    rule = config.range_rules.get(joint)
    if rule is None:
        raise UnknownJoint(f"no range rule for joint {joint!r}")
    if math.isnan(angle):
        raise ValueError(f"angle for {joint} is NaN; resolve missing data first")
    for lo, hi, score in rule.intervals:
        if lo <= angle < hi:
            return score
    # Only +inf can fall through the half-open chain.
    return rule.intervals[-1][2]


def _clamp_joint(joint: str, score: int) -> int:
    lo, hi = JOINT_SCORE_RANGE[joint]
    return min(hi, max(lo, score))


def apply_position_adjustments(base_scores: dict[str, int],
                               angles: Mapping[JointChannel, float],
                               config: RulaConfig | None = None,
                               side: Side | None = None) -> dict[str, int]:
    """Add each triggered position adjustment once and clamp to the joint's
    table-input range.

    ``side`` selects which sided rules apply; axial rules apply whenever
    their joint is present in ``base_scores``. Rules whose trigger channel
    is missing simply do not fire.
    """
    config = config or default_config()
    adjusted = dict(base_scores)
    for rule in config.position_rules:
        if rule.joint not in adjusted:
            continue
        if rule.side is not None and rule.side != side:
            continue
        angle = angles.get(rule.channel)
        if angle is None or (isinstance(angle, float) and math.isnan(angle)):
            continue
        if rule.triggered(float(angle)):
            adjusted[rule.joint] += rule.adjust
    return {joint: _clamp_joint(joint, score) for joint, score in adjusted.items()}


# --- frame and timeline scoring ------------------------------------------------------


@dataclass(frozen=True)
class SideScores:
    arm: int
    forearm: int
    wrist: int
    wrist_twist: int
    table_a_score: int
    score_c: int
    final: int


@dataclass(frozen=True)
class RulaFrameScore:
    left: SideScores
    right: SideScores
    neck: int
    trunk: int
    legs: int
    table_b_score: int
    score_d: int
    final: int
    band: RiskBand
    degraded: bool = False

    def side(self, side: Side) -> SideScores:
        return self.left if side == Side.left else self.right


def _local_score(joint: str, side_key: str, angles, config, strict: bool):
    """Range score for one joint, honouring the missing-channel policy."""
    rule = config.range_rules[joint]
    channel = rule.channels[side_key]
    angle = angles.get(channel)
    missing = angle is None or (isinstance(angle, float) and math.isnan(angle))
    if missing:
        if strict:
            raise IncompleteFrame(
                f"channel {channel.value} required for {joint} is missing"
            )
        return rule.min_score(), True
    return score_range(joint, float(angle), config), False


def score_frame(angles: Mapping[JointChannel, float],
                flags: AnnotationFlags = NEUTRAL_FLAGS,
                config: RulaConfig | None = None,
                strict: bool = False) -> RulaFrameScore:
    """Score one frame of joint angles under the given annotation flags.

    In lenient mode (default) a missing channel contributes its joint's
    minimum score and marks the frame degraded; strict mode raises
    IncompleteFrame instead.
    """
    config = config or default_config()
    degraded = False

    sides: dict[Side, SideScores] = {}
    shared_base: dict[str, int] = {}
    for joint in AXIAL_JOINTS:
        score, miss = _local_score(joint, "axial", angles, config, strict)
        shared_base[joint] = score
        degraded = degraded or miss
    shared = apply_position_adjustments(shared_base, angles, config, side=None)

    legs = min(2, max(1, int(flags.legs)))
    b_score = table_b(shared["neck"], shared["trunk"], legs, config)
    score_d = b_score + flags.neck_muscle + flags.neck_force

    for side, key in ((Side.left, "left"), (Side.right, "right")):
        base: dict[str, int] = {}
        for joint in SIDED_JOINTS:
            score, miss = _local_score(joint, key, angles, config, strict)
            base[joint] = score
            degraded = degraded or miss
        adjusted = apply_position_adjustments(base, angles, config, side=side)
        a_score = table_a(adjusted["arm"], adjusted["forearm"],
                          adjusted["wrist"], adjusted["wrist_twist"], config)
        score_c = a_score + flags.arm_muscle + flags.arm_force
        final = table_c(score_c, score_d, config)
        sides[side] = SideScores(
            arm=adjusted["arm"],
            forearm=adjusted["forearm"],
            wrist=adjusted["wrist"],
            wrist_twist=adjusted["wrist_twist"],
            table_a_score=a_score,
            score_c=score_c,
            final=final,
        )

    combined = max(sides[Side.left].final, sides[Side.right].final)
    return RulaFrameScore(
        left=sides[Side.left],
        right=sides[Side.right],
        neck=shared["neck"],
        trunk=shared["trunk"],
        legs=legs,
        table_b_score=b_score,
        score_d=score_d,
        final=combined,
        band=risk_band(combined, config),
        degraded=degraded,
    )


@dataclass(frozen=True)
class RulaTimeline:
    sample_rate: float
    start_time: float
    frames: tuple[RulaFrameScore, ...]

    @property
    def length(self) -> int:
        return len(self.frames)

    @property
    def times(self) -> np.ndarray:
        return self.start_time + np.arange(self.length) / self.sample_rate

    def finals(self) -> np.ndarray:
        return np.array([f.final for f in self.frames], dtype=int)

    def finals_for(self, side: Side) -> np.ndarray:
        return np.array([f.side(side).final for f in self.frames], dtype=int)

    def degraded_count(self) -> int:
        return sum(1 for f in self.frames if f.degraded)


def score_timeline(series: JointAngleSeries,
                   annotations: AnnotationTrack = EMPTY_ANNOTATIONS,
                   config: RulaConfig | None = None,
                   strict: bool = False) -> RulaTimeline:
    """Score every sample of a series; annotation flags apply to samples
    whose timestamp falls inside an interval."""
    config = config or default_config()
    if series.length == 0:
        raise EmptyTimeline("series has no samples")
    times = series.times
    frames = []
    for i in range(series.length):
        angles = {ch: float(values[i]) for ch, values in series.channels.items()}
        frames.append(
            score_frame(angles, annotations.flags_at(float(times[i])), config, strict)
        )
    return RulaTimeline(
        sample_rate=series.sample_rate,
        start_time=series.start_time,
        frames=tuple(frames),
    )


def risk_band(final: int, config: RulaConfig | None = None) -> RiskBand:
    config = config or default_config()
    for band, (lo, hi) in config.bands.items():
        if lo <= final <= hi:
            return band
    raise ValueError(f"final score {final} not covered by the band mapping")


def band_percentages(timeline: RulaTimeline) -> dict[RiskBand, float]:
    """Percent of samples per risk band; sums to 100 within 1e-9."""
    if timeline.length == 0:
        raise EmptyTimeline("timeline has no frames")
    counts = {band: 0 for band in RiskBand}
    for frame in timeline.frames:
        counts[frame.band] += 1
    n = timeline.length
    return {band: 100.0 * count / n for band, count in counts.items()}
