"""Two-system comparison: min-RMSE temporal alignment, per-channel RMSE and
Pearson correlation, and multi-run summaries.

Both recordings must share a sample rate (resample first; downsample to the
lower rate so nothing is invented for the sparser signal). One global lag
is estimated on a designated reference channel and applied to every
channel: per-channel lags would let timing error masquerade as tracking
error. Lag is positive when the second recording is delayed relative to
the first.

Missing samples are excluded pairwise per channel; a channel with less
than half of its overlap valid is reported unavailable rather than
silently dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ChannelSetMismatch,
    InsufficientOverlap,
    LengthMismatch,
    NoValidPairs,
    ReferenceChannelMissing,
    SampleRateMismatch,
    ZeroVariance,
)
from .motion import CHANNEL_ORDER, JointAngleSeries, JointChannel

#: Channels with less than this fraction of valid pairs in the aligned
#: overlap are reported unavailable.
MIN_VALID_FRACTION = 0.5

DEFAULT_MAX_LAG_SECONDS = 10.0
DEFAULT_MIN_OVERLAP_SECONDS = 5.0
DEFAULT_REFERENCE_CHANNEL = JointChannel.arm_flex_r


def rmse(a, b) -> float:
    """Root mean square difference over pairs where both samples are valid."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"lengths {a.shape} vs {b.shape}")
    valid = ~(np.isnan(a) | np.isnan(b))
    if not np.any(valid):
        raise NoValidPairs("no pair has both samples valid")
    d = a[valid] - b[valid]
    return float(np.sqrt(np.mean(d * d)))


def pearson_correlation(a, b) -> float:
    """Pearson coefficient over valid pairs, in [-1, 1]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"lengths {a.shape} vs {b.shape}")
    valid = ~(np.isnan(a) | np.isnan(b))
    if int(np.sum(valid)) < 2:
        raise NoValidPairs("need at least 2 valid pairs")
    da = a[valid] - np.mean(a[valid])
    db = b[valid] - np.mean(b[valid])
    ssa = float(np.dot(da, da))
    ssb = float(np.dot(db, db))
    if ssa == 0.0 or ssb == 0.0:
        raise ZeroVariance("a constant series has no correlation")
    r = float(np.dot(da, db)) / math.sqrt(ssa * ssb)
    return min(1.0, max(-1.0, r))


@dataclass(frozen=True)
class AlignmentResult:
    lag: int        # samples; positive = second series delayed
    overlap: int    # aligned overlap length at the chosen lag
    rmse: float     # RMSE at the chosen lag


def _overlap_slices(len_a: int, len_b: int, lag: int):
    i0 = max(0, -lag)
    i1 = min(len_a, len_b - lag)
    return i0, i1


def align_min_rmse(reference, other, max_lag: int, min_overlap: int = 1) -> AlignmentResult:
    """Integer lag in [-max_lag, max_lag] minimizing RMSE on the overlap.

    Ties break toward the smallest absolute lag, then toward the negative
    one. Raises InsufficientOverlap when no candidate lag leaves at least
    ``min_overlap`` samples of overlap with a valid pair.
    """
    reference = np.asarray(reference, dtype=float)
    other = np.asarray(other, dtype=float)
    best = None
    for lag in range(-max_lag, max_lag + 1):
        i0, i1 = _overlap_slices(len(reference), len(other), lag)
        if i1 - i0 < max(min_overlap, 1):
            continue
        try:
            value = rmse(reference[i0:i1], other[i0 + lag:i1 + lag])
        except NoValidPairs:
            continue
        key = (value, abs(lag), lag)
        if best is None or key < best[0]:
            best = (key, AlignmentResult(lag=lag, overlap=i1 - i0, rmse=value))
    if best is None:
        raise InsufficientOverlap(
            f"no lag within +/-{max_lag} leaves {min_overlap} overlapping samples"
        )
    return best[1]


def cross_correlation_peak(reference, other, max_lag: int,
                           min_overlap: int = 2) -> tuple[int, float]:
    """Lag maximizing the Pearson coefficient, for sensitivity analysis
    against the min-RMSE alignment."""
    reference = np.asarray(reference, dtype=float)
    other = np.asarray(other, dtype=float)
    best = None
    for lag in range(-max_lag, max_lag + 1):
        i0, i1 = _overlap_slices(len(reference), len(other), lag)
        if i1 - i0 < max(min_overlap, 2):
            continue
        try:
            r = pearson_correlation(reference[i0:i1], other[i0 + lag:i1 + lag])
        except (NoValidPairs, ZeroVariance):
            continue
        key = (-r, abs(lag), lag)
        if best is None or key < best[0]:
            best = (key, (lag, r))
    if best is None:
        raise InsufficientOverlap(
            f"no lag within +/-{max_lag} leaves {min_overlap} overlapping samples"
        )
    return best[1]


@dataclass(frozen=True)
class ChannelComparison:
    """Per-channel outcome; None metrics mean the channel could not be
    compared, with ``note`` saying why."""

    rmse: float | None
    correlation: float | None
    valid_fraction: float
    note: str = ""

    @property
    def available(self) -> bool:
        return self.rmse is not None


@dataclass(frozen=True)
class ComparisonReport:
    lag: int
    sample_rate: float
    reference_channel: JointChannel
    channels: dict[JointChannel, ChannelComparison]

    @property
    def lag_seconds(self) -> float:
        return self.lag / self.sample_rate


def _ordered_channels(keys) -> list[JointChannel]:
    keys = set(keys)
    ordered = [ch for ch in CHANNEL_ORDER if ch in keys]
    ordered.extend(sorted(keys - set(ordered), key=lambda c: c.value))
    return ordered


def compare_recordings(a: JointAngleSeries, b: JointAngleSeries,
                       reference_channel: JointChannel = DEFAULT_REFERENCE_CHANNEL,
                       max_lag_seconds: float = DEFAULT_MAX_LAG_SECONDS,
                       min_overlap_seconds: float = DEFAULT_MIN_OVERLAP_SECONDS,
                       ) -> ComparisonReport:
    """Compare two recordings of the same task at a common sample rate.

    The global lag comes from ``reference_channel``; every channel is then
    scored on the aligned overlap.
    """
    if not math.isclose(a.sample_rate, b.sample_rate, rel_tol=1e-9):
        raise SampleRateMismatch(
            f"rates differ: {a.sample_rate} vs {b.sample_rate}; resample first"
        )
    rate = a.sample_rate
    max_lag = max(1, int(round(max_lag_seconds * rate)))
    min_overlap = max(1, int(round(min_overlap_seconds * rate)))

    if reference_channel not in a.channels or reference_channel not in b.channels:
        raise ReferenceChannelMissing(
            f"reference channel {reference_channel.value} absent from an input"
        )
    alignment = align_min_rmse(
        a.channels[reference_channel], b.channels[reference_channel],
        max_lag=max_lag, min_overlap=min_overlap,
    )
    lag = alignment.lag

    results: dict[JointChannel, ChannelComparison] = {}
    for ch in _ordered_channels(set(a.channels) | set(b.channels)):
        if ch not in a.channels or ch not in b.channels:
            which = "first" if ch not in a.channels else "second"
            results[ch] = ChannelComparison(
                rmse=None, correlation=None, valid_fraction=0.0,
                note=f"missing in {which} recording",
            )
            continue
        i0, i1 = _overlap_slices(a.length, b.length, lag)
        xa = a.channels[ch][i0:i1]
        xb = b.channels[ch][i0 + lag:i1 + lag]
        overlap = i1 - i0
        valid = ~(np.isnan(xa) | np.isnan(xb))
        fraction = float(np.sum(valid)) / overlap if overlap else 0.0
        if fraction < MIN_VALID_FRACTION:
            results[ch] = ChannelComparison(
                rmse=None, correlation=None, valid_fraction=fraction,
                note=f"only {fraction:.2f} of the overlap valid",
            )
            continue
        value = rmse(xa, xb)
        try:
            corr = pearson_correlation(xa, xb)
            note = ""
        except ZeroVariance:
            corr = None
            note = "zero variance"
        results[ch] = ChannelComparison(
            rmse=value, correlation=corr, valid_fraction=fraction, note=note,
        )

    return ComparisonReport(
        lag=lag, sample_rate=rate,
        reference_channel=reference_channel, channels=results,
    )


@dataclass(frozen=True)
class ChannelRunStats:
    rmse_runs: tuple[float | None, ...]
    rmse_mean: float | None
    correlation_runs: tuple[float | None, ...]
    correlation_mean: float | None
    notes: tuple[str, ...]


@dataclass(frozen=True)
class ComparisonSummary:
    n_runs: int
    lags: tuple[int, ...]
    sample_rate: float
    reference_channel: JointChannel
    channels: dict[JointChannel, ChannelRunStats]


def _mean_or_none(values) -> float | None:
    present = [v for v in values if v is not None]
    if not present:
        return None
    return float(np.mean(present))


def summarize_runs(reports) -> ComparisonSummary:
    """Mean across runs per channel and metric; all runs must cover the
    same channel set."""
    reports = list(reports)
    if not reports:
        raise ChannelSetMismatch("no reports to summarize")
    key_set = set(reports[0].channels)
    for i, report in enumerate(reports[1:], start=2):
        if set(report.channels) != key_set:
            raise ChannelSetMismatch(f"run {i} covers a different channel set")

    channels: dict[JointChannel, ChannelRunStats] = {}
    for ch in _ordered_channels(key_set):
        per_run = [report.channels[ch] for report in reports]
        channels[ch] = ChannelRunStats(
            rmse_runs=tuple(c.rmse for c in per_run),
            rmse_mean=_mean_or_none([c.rmse for c in per_run]),
            correlation_runs=tuple(c.correlation for c in per_run),
            correlation_mean=_mean_or_none([c.correlation for c in per_run]),
            notes=tuple(c.note for c in per_run),
        )
    return ComparisonSummary(
        n_runs=len(reports),
        lags=tuple(r.lag for r in reports),
        sample_rate=reports[0].sample_rate,
        reference_channel=reports[0].reference_channel,
        channels=channels,
    )
