import json
import math

import numpy as np
import pytest

from ergokit.errors import (
    EmptyFile,
    InvalidForceValue,
    MalformedRecord,
    MissingColumn,
    NonMonotonicTimestamps,
    OverlappingIntervals,
    TooShort,
)
from ergokit.ingest import (
    ImuCsvSpec,
    format_annotations,
    format_imu_joint_csv,
    format_keypoint_stream,
    parse_annotations,
    parse_imu_joint_csv,
    parse_keypoint_stream,
    resample,
)
from ergokit.motion import (
    AnnotationInterval,
    AnnotationTrack,
    JointAngleSeries,
    JointChannel,
    Landmark,
)
from ergokit.synthetic import neutral_frame


def _three_channel_spec():
    return ImuCsvSpec(
        channel_columns={
            "arm_flex_r": JointChannel.arm_flex_r,
            "elbow_flex_r": JointChannel.elbow_flex_r,
            "lumbar_flexion": JointChannel.lumbar_flexion,
        },
    )


def test_parse_imu_csv_direct():
    text = "arm_flex_r,elbow_flex_r,lumbar_flexion\n1.0,2.0,3.0\n4.0,5.0,6.0\n"
    series = parse_imu_joint_csv(text, _three_channel_spec())
    assert series.length == 2
    assert set(series.channels) == {
        JointChannel.arm_flex_r, JointChannel.elbow_flex_r, JointChannel.lumbar_flexion,
    }
    assert series.sample_rate == 100.0
    assert series.channels[JointChannel.arm_flex_r].tolist() == [1.0, 4.0]


def test_parse_imu_csv_missing_column():
    text = "arm_flex_r,elbow_flex_r\n1.0,2.0\n"
    with pytest.raises(MissingColumn) as err:
        parse_imu_joint_csv(text, _three_channel_spec())
    assert "lumbar_flexion" in str(err.value)


def test_parse_imu_csv_empty_file():
    with pytest.raises(EmptyFile):
        parse_imu_joint_csv("", _three_channel_spec())


def test_parse_imu_csv_300_rows_duration():
    rows = "\n".join("0.0,0.0,0.0" for _ in range(300))
    text = "arm_flex_r,elbow_flex_r,lumbar_flexion\n" + rows + "\n"
    series = parse_imu_joint_csv(text, _three_channel_spec())
    assert series.length == 300
    assert series.duration == 2.99  # 299 intervals at 0.01 s


def test_parse_imu_csv_unparseable_cells_become_missing():
    text = "arm_flex_r,elbow_flex_r,lumbar_flexion\n1.0,oops,3.0\n4.0,5.0,6.0\n"
    series = parse_imu_joint_csv(text, _three_channel_spec())
    assert series.meta["unparseable_cells"] == 1
    assert math.isnan(series.channels[JointChannel.elbow_flex_r][0])
    assert series.channels[JointChannel.elbow_flex_r][1] == 5.0


def test_parse_imu_csv_time_column_wins():
    text = "time,arm_flex_r,elbow_flex_r,lumbar_flexion\n" + "\n".join(
        f"{i * 0.02},{i},{i},{i}" for i in range(50)
    ) + "\n"
    series = parse_imu_joint_csv(text, _three_channel_spec())
    assert math.isclose(series.sample_rate, 50.0, rel_tol=1e-9)


def test_imu_csv_round_trip(rng):
    channels = {}
    for ch in JointChannel:
        values = rng.normal(scale=30.0, size=40)
        values[rng.integers(0, 40)] = np.nan
        channels[ch] = values
    series = JointAngleSeries(sample_rate=100.0, start_time=0.0, channels=channels)
    text = format_imu_joint_csv(series)
    parsed = parse_imu_joint_csv(text)
    assert parsed.length == series.length
    for ch in JointChannel:
        a, b = series.channels[ch], parsed.channels[ch]
        assert np.array_equal(a, b, equal_nan=True)
    reparsed = parse_imu_joint_csv(format_imu_joint_csv(parsed))
    for ch in JointChannel:
        assert np.array_equal(parsed.channels[ch], reparsed.channels[ch], equal_nan=True)


# --- keypoint stream -----------------------------------------------------------


def _record(frame, points, time=None):
    doc = {"frame": frame, "points": points}
    if time is not None:
        doc["time"] = time
    return json.dumps(doc)


def test_parse_keypoint_stream_timestamps():
    full = {lm.value: list(map(float, p)) for lm, p in neutral_frame().positions.items()}
    text = "\n".join(_record(i, full) for i in range(3))
    frames = parse_keypoint_stream(text)
    assert len(frames) == 3
    assert frames[0].timestamp == 0.0
    assert math.isclose(frames[1].timestamp, 1 / 30)
    assert math.isclose(frames[2].timestamp, 2 / 30)
    assert not frames[0].incomplete


def test_parse_keypoint_stream_incomplete_frame():
    full = {lm.value: list(map(float, p)) for lm, p in neutral_frame().positions.items()}
    partial = dict(full)
    del partial["nose"]
    text = "\n".join([_record(0, full), _record(1, partial)])
    frames = parse_keypoint_stream(text)
    assert not frames[0].incomplete
    assert frames[1].incomplete
    assert Landmark.nose not in frames[1].positions


def test_parse_keypoint_stream_non_monotonic():
    full = {lm.value: list(map(float, p)) for lm, p in neutral_frame().positions.items()}
    text = "\n".join([
        _record(0, full, time=0.0),
        _record(1, full, time=0.5),
        _record(2, full, time=0.4),
    ])
    with pytest.raises(NonMonotonicTimestamps):
        parse_keypoint_stream(text)


def test_parse_keypoint_stream_malformed_record_has_line_number():
    full = {lm.value: list(map(float, p)) for lm, p in neutral_frame().positions.items()}
    text = "\n".join([_record(0, full), "not json"])
    with pytest.raises(MalformedRecord) as err:
        parse_keypoint_stream(text)
    assert "line 2" in str(err.value)


def test_parse_keypoint_stream_ignores_unknown_labels():
    full = {lm.value: list(map(float, p)) for lm, p in neutral_frame().positions.items()}
    full["left_ear"] = [0.0, 0.1, 1.7]
    frames = parse_keypoint_stream(_record(0, full))
    assert len(frames[0].positions) == len(Landmark)


def test_keypoint_stream_round_trip():
    frames = [neutral_frame(0.0), neutral_frame(1 / 30)]
    text = format_keypoint_stream(frames)
    parsed = parse_keypoint_stream(text)
    assert len(parsed) == 2
    for original, back in zip(frames, parsed):
        for lm in original.positions:
            assert np.array_equal(original.positions[lm], back.positions[lm])


# --- annotations ----------------------------------------------------------------


def test_parse_annotations():
    text = (
        "t0,t1,arm_muscle,arm_force,neck_muscle,neck_force,legs\n"
        "0,10,0,2,0,0,1\n"
    )
    track = parse_annotations(text)
    assert len(track.intervals) == 1
    assert track.flags_at(5.0).arm_force == 2


def test_parse_annotations_overlap():
    text = (
        "t0,t1,arm_muscle,arm_force,neck_muscle,neck_force,legs\n"
        "0,5,0,1,0,0,1\n"
        "4,8,0,1,0,0,1\n"
    )
    with pytest.raises(OverlappingIntervals):
        parse_annotations(text)


def test_parse_annotations_bad_force():
    text = (
        "t0,t1,arm_muscle,arm_force,neck_muscle,neck_force,legs\n"
        "0,5,0,5,0,0,1\n"
    )
    with pytest.raises(InvalidForceValue):
        parse_annotations(text)


def test_annotations_round_trip():
    track = AnnotationTrack.from_intervals([
        AnnotationInterval(t0=0.0, t1=5.0, arm_force=1, legs=2),
        AnnotationInterval(t0=6.0, t1=9.0, neck_muscle=1),
    ])
    assert parse_annotations(format_annotations(track)) == track


# --- resampling -----------------------------------------------------------------


def _one_channel(values, rate):
    return JointAngleSeries(
        sample_rate=rate, start_time=0.0,
        channels={JointChannel.arm_flex_r: np.asarray(values, dtype=float)},
    )


def test_resample_constant():
    series = _one_channel(np.full(101, 42.0), 100.0)
    out = resample(series, 30.0)
    assert np.all(out.channels[JointChannel.arm_flex_r] == 42.0)
    assert out.sample_rate == 30.0


def test_resample_linear_ramp_exact():
    t = np.arange(101) / 100.0
    out = resample(_one_channel(t, 100.0), 30.0)
    assert np.max(np.abs(out.channels[JointChannel.arm_flex_r] - out.times)) < 1e-12


def test_resample_sine_oracle():
    t = np.arange(301) / 100.0
    out = resample(_one_channel(np.sin(2 * np.pi * t), 100.0), 30.0)
    expected = np.sin(2 * np.pi * out.times)
    assert np.max(np.abs(out.channels[JointChannel.arm_flex_r] - expected)) < 1e-3


def test_resample_identity_at_source_rate():
    values = np.sin(np.arange(300) * 0.37) * 25.0
    values[17] = np.nan
    series = _one_channel(values, 100.0)
    out = resample(series, 100.0)
    assert out.length == 300
    a, b = series.channels[JointChannel.arm_flex_r], out.channels[JointChannel.arm_flex_r]
    valid = ~np.isnan(a)
    assert np.max(np.abs(a[valid] - b[valid])) < 1e-12
    assert np.array_equal(np.isnan(a), np.isnan(b))


def test_resample_preserves_extrema(rng):
    values = rng.normal(scale=50.0, size=200)
    series = _one_channel(values, 100.0)
    out = resample(series, 73.0).channels[JointChannel.arm_flex_r]
    assert np.min(out) >= np.min(values) - 1e-12
    assert np.max(out) <= np.max(values) + 1e-12


def test_resample_nan_propagates_to_touching_stencils():
    values = np.arange(10, dtype=float)
    values[5] = np.nan
    out = resample(_one_channel(values, 10.0), 20.0)
    x = out.channels[JointChannel.arm_flex_r]
    # Outputs interpolating across sample 5 are missing; exact hits on
    # neighbouring samples are not.
    assert np.isnan(x[9])   # t=0.45 uses samples 4 and 5
    assert np.isnan(x[10])  # t=0.50 is exactly sample 5
    assert np.isnan(x[11])  # t=0.55 uses samples 5 and 6
    assert x[8] == 4.0
    assert x[12] == 6.0


def test_resample_too_short():
    with pytest.raises(TooShort):
        resample(_one_channel([1.0], 100.0), 30.0)


def test_resample_output_length():
    series = _one_channel(np.zeros(300), 100.0)
    out = resample(series, 30.0)
    assert out.length == math.floor(2.99 * 30.0) + 1
