"""ergokit: multimodal ergonomic assessment from motion-capture data.

Joint-angle series come from IMU CSV exports or markerless 3D keypoint
streams; both feed the same data-driven RULA scoring, risk-band reporting,
and two-system comparison statistics.
"""

from .motion import (
    AnnotationFlags,
    AnnotationInterval,
    AnnotationTrack,
    ChannelSummary,
    JointAngleSeries,
    JointChannel,
    KeypointFrame,
    Landmark,
    Side,
    channel_side,
    channel_summary,
)
from .ingest import (
    ImuCsvSpec,
    KeypointStreamSpec,
    format_imu_joint_csv,
    parse_annotations,
    parse_imu_joint_csv,
    parse_keypoint_stream,
    resample,
)
from .geometry import (
    AngleDefinition,
    Baseline,
    compute_angle_series,
    compute_joint_angles,
    default_angle_definitions,
    load_angle_definitions,
    neck_baseline,
    signed_plane_angle,
    vector_angle,
)
from .rula import (
    RiskBand,
    RulaConfig,
    RulaFrameScore,
    RulaTimeline,
    apply_position_adjustments,
    band_percentages,
    default_config,
    load_rula_config,
    risk_band,
    score_frame,
    score_range,
    score_timeline,
    table_a,
    table_b,
    table_c,
    validate_rula_config,
)
from .compare import (
    AlignmentResult,
    ComparisonReport,
    ComparisonSummary,
    align_min_rmse,
    compare_recordings,
    cross_correlation_peak,
    pearson_correlation,
    rmse,
    summarize_runs,
)
from .reporting import (
    SessionReport,
    build_session_report,
    emit_comparison_report,
    emit_plot_series,
    emit_session_report,
    format_band_shares,
    format_percent,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
