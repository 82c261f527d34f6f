"""Report emission: session reports, comparison tables, and plot-ready data.

Emitters are deterministic: fixed orderings (risk bands in report order,
channels in the declared channel order) and fixed float formatting
(3 decimals for statistics, 1 for percentages, rendered as ``12.3 %``).
The structured (JSON) and delimited (CSV) renderings of a report carry the
same rounded numeric values.

No images are rendered here; plot emitters produce delimited files any
plotting tool can consume: the per-side score-over-time series, the band
shares behind the pie charts, and the per-channel RMSE/correlation bar
tables.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyChannel, EmptyInput, EmptyTimeline
from .motion import (
    CHANNEL_ORDER,
    ChannelSummary,
    JointAngleSeries,
    JointChannel,
    Side,
    channel_summary,
)
from .compare import ComparisonReport, ComparisonSummary, summarize_runs
from .rula import RiskBand, RulaConfig, RulaTimeline, band_percentages


def format_percent(value: float) -> str:
    return f"{value:.1f} %"


def format_band_shares(percentages: dict[RiskBand, float]) -> str:
    """The four band shares as one display string, band order fixed:
    negligible / low / medium / very high."""
    return " / ".join(format_percent(percentages[band]) for band in RiskBand)


def _stat(value: float | None):
    return None if value is None else round(float(value), 3)


def _stat_cell(value: float | None) -> str:
    return "" if value is None else f"{value:.3f}"


# --- session reports ---------------------------------------------------------


@dataclass(frozen=True)
class SessionReport:
    source_kind: str
    sample_rate: float
    duration: float
    samples: int
    config_checksum: str
    degraded_frames: int
    band_percentages: dict[RiskBand, float]
    times: np.ndarray
    left: np.ndarray
    right: np.ndarray
    combined: np.ndarray
    channel_summaries: dict[JointChannel, ChannelSummary]
    flags: dict = field(default_factory=dict)


def build_session_report(timeline: RulaTimeline,
                         series: JointAngleSeries | None = None,
                         source_kind: str = "unknown",
                         config: RulaConfig | None = None,
                         flags: dict | None = None) -> SessionReport:
    if timeline.length == 0:
        raise EmptyTimeline("cannot report an empty timeline")
    summaries: dict[JointChannel, ChannelSummary] = {}
    if series is not None:
        for ch in CHANNEL_ORDER:
            if ch in series.channels:
                try:
                    summaries[ch] = channel_summary(series, ch)
                except EmptyChannel:
                    continue
    return SessionReport(
        source_kind=source_kind,
        sample_rate=timeline.sample_rate,
        duration=(timeline.length - 1) / timeline.sample_rate,
        samples=timeline.length,
        config_checksum=config.checksum if config is not None else "",
        degraded_frames=timeline.degraded_count(),
        band_percentages=band_percentages(timeline),
        times=timeline.times,
        left=timeline.finals_for(Side.left),
        right=timeline.finals_for(Side.right),
        combined=timeline.finals(),
        channel_summaries=summaries,
        flags=dict(flags or {}),
    )


def emit_session_report(report: SessionReport, format: str = "structured") -> str:
    if format == "structured":
        return _session_json(report)
    if format == "delimited":
        return _session_csv(report)
    raise ValueError(f"unknown format {format!r}")


def _session_json(report: SessionReport) -> str:
    doc = {
        "kind": "session",
        "source_kind": report.source_kind,
        "sample_rate": round(report.sample_rate, 3),
        "duration": round(report.duration, 3),
        "samples": report.samples,
        "config_checksum": report.config_checksum,
        "degraded_frames": report.degraded_frames,
        "flags": report.flags,
        "band_percentages": {
            band.value: round(report.band_percentages[band], 1) for band in RiskBand
        },
        "band_shares": format_band_shares(report.band_percentages),
        "scores": {
            "time": [round(float(t), 3) for t in report.times],
            "left": [int(v) for v in report.left],
            "right": [int(v) for v in report.right],
            "combined": [int(v) for v in report.combined],
        },
        "channel_summaries": {
            ch.value: {
                "mean": _stat(s.mean),
                "std_dev": _stat(s.std_dev),
                "min": _stat(s.min),
                "max": _stat(s.max),
            }
            for ch, s in report.channel_summaries.items()
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def _session_csv(report: SessionReport) -> str:
    lines = ["key,value"]
    lines.append("kind,session")
    lines.append(f"source_kind,{report.source_kind}")
    lines.append(f"sample_rate,{report.sample_rate:.3f}")
    lines.append(f"duration,{report.duration:.3f}")
    lines.append(f"samples,{report.samples}")
    lines.append(f"config_checksum,{report.config_checksum}")
    lines.append(f"degraded_frames,{report.degraded_frames}")
    for key in sorted(report.flags):
        lines.append(f"flag:{key},{report.flags[key]}")
    lines.append(f"band_shares,{format_band_shares(report.band_percentages)}")
    lines.append("")
    lines.append("band,percent")
    for band in RiskBand:
        lines.append(f"{band.value},{format_percent(report.band_percentages[band])}")
    lines.append("")
    lines.append("time,left,right,combined")
    for i in range(report.samples):
        lines.append(
            f"{report.times[i]:.3f},{int(report.left[i])},"
            f"{int(report.right[i])},{int(report.combined[i])}"
        )
    if report.channel_summaries:
        lines.append("")
        lines.append("channel,mean,std_dev,min,max")
        for ch, s in report.channel_summaries.items():
            lines.append(
                f"{ch.value},{s.mean:.3f},{s.std_dev:.3f},{s.min:.3f},{s.max:.3f}"
            )
    return "\n".join(lines) + "\n"


# --- comparison reports ---------------------------------------------------------


def _as_summary(obj) -> ComparisonSummary:
    if isinstance(obj, ComparisonSummary):
        return obj
    if isinstance(obj, ComparisonReport):
        return summarize_runs([obj])
    raise TypeError(f"expected ComparisonReport or ComparisonSummary, got {type(obj)}")


def emit_comparison_report(report, format: str = "structured") -> str:
    """Channels as rows, runs as columns, MEAN last; channels that could
    not be compared are flagged, never dropped."""
    summary = _as_summary(report)
    if not summary.channels:
        raise EmptyInput("comparison covers no channels")
    if format == "structured":
        return _comparison_json(summary)
    if format == "delimited":
        return _comparison_csv(summary)
    raise ValueError(f"unknown format {format!r}")


def _comparison_json(summary: ComparisonSummary) -> str:
    doc = {
        "kind": "comparison",
        "runs": summary.n_runs,
        "sample_rate": round(summary.sample_rate, 3),
        "reference_channel": summary.reference_channel.value,
        "lag_samples": list(summary.lags),
        "channels": {
            ch.value: {
                "rmse": {
                    "runs": [_stat(v) for v in stats.rmse_runs],
                    "mean": _stat(stats.rmse_mean),
                },
                "correlation": {
                    "runs": [_stat(v) for v in stats.correlation_runs],
                    "mean": _stat(stats.correlation_mean),
                },
                "notes": [n for n in stats.notes if n],
            }
            for ch, stats in summary.channels.items()
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def _metric_table(summary: ComparisonSummary, metric: str,
                  include_note: bool) -> list[str]:
    record_cols = ",".join(f"record_{i + 1}" for i in range(summary.n_runs))
    header = f"{metric},{record_cols},mean"
    if include_note:
        header += ",note"
    lines = [header]
    for ch, stats in summary.channels.items():
        if metric == "rmse":
            runs, mean = stats.rmse_runs, stats.rmse_mean
        else:
            runs, mean = stats.correlation_runs, stats.correlation_mean
        cells = [ch.value] + [_stat_cell(v) for v in runs] + [_stat_cell(mean)]
        if include_note:
            cells.append(next((n for n in stats.notes if n), ""))
        lines.append(",".join(cells))
    return lines


def _comparison_csv(summary: ComparisonSummary) -> str:
    lines = _metric_table(summary, "rmse", include_note=True)
    lines.append("")
    lines.extend(_metric_table(summary, "correlation", include_note=True))
    return "\n".join(lines) + "\n"


# --- plot-ready data --------------------------------------------------------------


def emit_plot_series(obj) -> dict[str, str]:
    """Delimited plot-data files for a timeline or a comparison.

    Timeline: score-over-time per side plus the band-share table behind a
    pie chart. Comparison: per-channel RMSE and correlation bar tables.
    """
    if isinstance(obj, RulaTimeline):
        if obj.length == 0:
            raise EmptyInput("empty timeline")
        times = obj.times
        left = obj.finals_for(Side.left)
        right = obj.finals_for(Side.right)
        combined = obj.finals()
        score_lines = ["time,left,right,combined"]
        for i in range(obj.length):
            score_lines.append(
                f"{times[i]:.3f},{int(left[i])},{int(right[i])},{int(combined[i])}"
            )
        percentages = band_percentages(obj)
        band_lines = ["band,percent"]
        for band in RiskBand:
            band_lines.append(f"{band.value},{percentages[band]:.1f}")
        return {
            "rula_scores.csv": "\n".join(score_lines) + "\n",
            "rula_bands.csv": "\n".join(band_lines) + "\n",
        }

    summary = _as_summary(obj)
    if not summary.channels:
        raise EmptyInput("comparison covers no channels")
    return {
        "comparison_rmse.csv":
            "\n".join(_metric_table(summary, "rmse", include_note=False)) + "\n",
        "comparison_correlation.csv":
            "\n".join(_metric_table(summary, "correlation", include_note=False)) + "\n",
    }
