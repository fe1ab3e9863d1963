import io

import numpy as np
import pytest

from f0kit import (
    PitchTrack,
    SpectrogramConfig,
    SynthSpec,
    TrackerConfig,
    envelope,
    export_table,
    render_plot,
    spectrogram,
    synthesize,
    track,
)


def analyzed_tone(f0=1000.0, duration=0.25, **tracker_kwargs):
    clip, _ = synthesize(SynthSpec.tone(f0, duration=duration), 44100)
    cfg = SpectrogramConfig()
    spec = spectrogram(clip, cfg)
    env = envelope(clip, cfg)
    return spec, env, track(spec, env, TrackerConfig(**tracker_kwargs))


class TestTable:
    def test_header_and_first_row(self):
        _, _, result = analyzed_tone()
        buf = io.StringIO()
        export_table(result, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "# time_s\tf0_hz"
        assert lines[1] == "0.011610\t990.527"

    def test_row_count_returned(self):
        _, _, result = analyzed_tone()
        buf = io.StringIO()
        assert export_table(result, buf) == result.n_frames
        assert len(buf.getvalue().splitlines()) == result.n_frames + 1

    def test_unvoiced_written_as_nan(self):
        result = PitchTrack(
            times=np.array([0.0]), f0=np.array([np.nan]),
            peak_magnitude=np.array([0.0]), voiced=np.array([False]),
            config=TrackerConfig())
        buf = io.StringIO()
        export_table(result, buf)
        assert buf.getvalue().splitlines()[1] == "0.000000\tnan"

    def test_empty_track_rejected(self):
        empty = PitchTrack(times=np.zeros(0), f0=np.zeros(0),
                           peak_magnitude=np.zeros(0),
                           voiced=np.zeros(0, dtype=bool),
                           config=TrackerConfig())
        buf = io.StringIO()
        with pytest.raises(ValueError):
            export_table(empty, buf)
        assert buf.getvalue() == ""

    def test_round_trip_parse(self):
        _, _, result = analyzed_tone()
        buf = io.StringIO()
        export_table(result, buf)
        rows = [line.split("\t") for line in buf.getvalue().splitlines()[1:]]
        times = np.array([float(t) for t, _ in rows])
        f0 = np.array([float(v) for _, v in rows])
        np.testing.assert_allclose(times, result.times, atol=5e-7)
        np.testing.assert_allclose(f0[~np.isnan(f0)], result.voiced_f0(), atol=5e-4)
        assert np.array_equal(np.isnan(f0), ~result.voiced)

    def test_rows_ascend_in_time(self):
        _, _, result = analyzed_tone(duration=1.0)
        buf = io.StringIO()
        export_table(result, buf)
        times = [float(line.split("\t")[0])
                 for line in buf.getvalue().splitlines()[1:]]
        assert times == sorted(times)

    def test_byte_determinism(self):
        _, _, result = analyzed_tone()
        a, b = io.StringIO(), io.StringIO()
        export_table(result, a)
        export_table(result, b)
        assert a.getvalue() == b.getvalue()


class TestPlot:
    def test_structure_and_marker_count(self, tmp_path):
        spec, env, result = analyzed_tone()
        path = tmp_path / "plot.svg"
        render_plot(spec, result, env, path)
        content = path.read_text()
        assert content.startswith("<svg ")
        assert content.rstrip().endswith("</svg>")
        assert content.count('class="f0"') == int(result.voiced.sum())
        assert path.stat().st_size > 1000

    def test_all_unvoiced_track_renders(self, tmp_path):
        clip, _ = synthesize(SynthSpec.silence(duration=0.5), 44100)
        cfg = SpectrogramConfig()
        spec = spectrogram(clip, cfg)
        env = envelope(clip, cfg)
        result = track(spec, env)
        path = tmp_path / "plot.svg"
        render_plot(spec, result, env, path)
        content = path.read_text()
        assert content.count('class="f0"') == 0
        assert "</svg>" in content

    def test_byte_determinism(self, tmp_path):
        spec, env, result = analyzed_tone()
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        render_plot(spec, result, env, a)
        render_plot(spec, result, env, b)
        assert a.read_bytes() == b.read_bytes()

    def test_inputs_not_mutated(self, tmp_path):
        spec, env, result = analyzed_tone()
        mags_before = spec.magnitudes.copy()
        f0_before = result.f0.copy()
        render_plot(spec, result, env, tmp_path / "plot.svg")
        assert np.array_equal(spec.magnitudes, mags_before)
        assert np.array_equal(result.f0, f0_before, equal_nan=True)
