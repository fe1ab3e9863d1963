import numpy as np
import pytest

from f0kit import SynthSpec, synthesize, write_wav
from f0kit.cli import build_parser, exit_code_for, main
from f0kit.errors import (
    ClipTooShortError,
    ConfigError,
    EmptyBandError,
    MalformedHeaderError,
)


@pytest.fixture
def tone_wav(tmp_path):
    clip, _ = synthesize(SynthSpec.tone(1000.0, duration=1.0), 44100)
    path = tmp_path / "tone.wav"
    write_wav(path, clip)
    return path


def read_rows(path):
    lines = path.read_text().splitlines()
    assert lines[0] == "# time_s\tf0_hz"
    return lines[1:]


class TestHappyPath:
    def test_default_run(self, tone_wav, capsys):
        out = tone_wav.parent / "table.txt"
        assert main(["track", str(tone_wav), "--out", str(out)]) == 0
        rows = read_rows(out)
        assert len(rows) == 85
        summary = capsys.readouterr().out.strip()
        assert "frames=85" in summary
        assert "voiced=100.0%" in summary
        assert "elapsed=" in summary and "ms" in summary

    def test_default_output_name(self, tone_wav, capsys):
        assert main(["track", str(tone_wav)]) == 0
        assert (tone_wav.parent / "tone.f0.txt").exists()

    def test_plot_output(self, tone_wav, capsys):
        out = tone_wav.parent / "t.txt"
        plot = tone_wav.parent / "p.svg"
        code = main(["track", str(tone_wav), "--out", str(out),
                     "--plot", str(plot)])
        assert code == 0
        assert plot.read_text().startswith("<svg ")

    def test_repeat_runs_byte_identical(self, tone_wav, capsys):
        a = tone_wav.parent / "a.txt"
        b = tone_wav.parent / "b.txt"
        assert main(["track", str(tone_wav), "--out", str(a)]) == 0
        assert main(["track", str(tone_wav), "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    @pytest.mark.parametrize("method", ["specmax", "acf", "yin", "cepstrum"])
    def test_all_methods_run(self, tone_wav, capsys, method, tmp_path):
        out = tmp_path / f"{method}.txt"
        assert main(["track", str(tone_wav), "--method", method,
                     "--out", str(out)]) == 0
        assert out.exists()

    def test_multiple_inputs_to_directory(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("F0_NUM_THREADS", "2")
        paths = []
        for i, f0 in enumerate([1000.0, 2000.0]):
            clip, _ = synthesize(SynthSpec.tone(f0, duration=0.5), 44100)
            p = tmp_path / f"in{i}.wav"
            write_wav(p, clip)
            paths.append(str(p))
        out_dir = tmp_path / "tables"
        assert main(["track", *paths, "--out", str(out_dir)]) == 0
        assert (out_dir / "in0.f0.txt").exists()
        assert (out_dir / "in1.f0.txt").exists()
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith(paths[0])  # summaries keep input order

    def test_refine_changes_values(self, tone_wav, capsys, tmp_path):
        coarse = tmp_path / "c.txt"
        fine = tmp_path / "f.txt"
        main(["track", str(tone_wav), "--out", str(coarse)])
        main(["track", str(tone_wav), "--refine", "--out", str(fine)])
        raw = float(read_rows(coarse)[0].split("\t")[1])
        refined = float(read_rows(fine)[0].split("\t")[1])
        assert abs(refined - 1000.0) < abs(raw - 1000.0)

    def test_dump_config(self, tone_wav, capsys, tmp_path):
        main(["track", str(tone_wav), "--method", "yin",
              "--yin-threshold", "0.2", "--out", str(tmp_path / "t.txt"),
              "--dump-config"])
        out = capsys.readouterr().out
        assert "method=yin" in out
        assert "baseline.yin_threshold=0.2" in out
        assert "tracker.f_min=800.0" in out


class TestDiagnostics:
    def test_inverted_band_fails_validation(self, tone_wav, capsys, tmp_path):
        code = main(["track", str(tone_wav), "--fmin", "9000", "--fmax", "8000",
                     "--out", str(tmp_path / "t.txt")])
        assert code == exit_code_for(ConfigError(""))
        assert "f_min" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        code = main(["track", str(tmp_path / "ghost.wav")])
        assert code == exit_code_for(OSError())
        assert "ghost.wav" in capsys.readouterr().err

    def test_malformed_wav(self, tmp_path, capsys):
        bad = tmp_path / "bad.wav"
        bad.write_bytes(b"definitely not riff data")
        code = main(["track", str(bad)])
        assert code == exit_code_for(MalformedHeaderError(""))
        assert "bad.wav" in capsys.readouterr().err

    def test_empty_band_exit_code(self, tone_wav, capsys, tmp_path):
        code = main(["track", str(tone_wav), "--fmin", "100", "--fmax", "120",
                     "--out", str(tmp_path / "t.txt")])
        assert code == exit_code_for(EmptyBandError(""))

    def test_too_short_clip_exit_code(self, tmp_path, capsys):
        clip, _ = synthesize(SynthSpec.tone(1000.0, duration=0.01), 44100)
        path = tmp_path / "short.wav"
        write_wav(path, clip)
        code = main(["track", str(path)])
        assert code == exit_code_for(ClipTooShortError(""))

    def test_failed_file_does_not_block_others(self, tone_wav, tmp_path, capsys):
        ghost = tmp_path / "ghost.wav"
        out_dir = tmp_path / "out"
        code = main(["track", str(ghost), str(tone_wav), "--out", str(out_dir)])
        assert code != 0
        assert (out_dir / "tone.f0.txt").exists()

    def test_no_artifact_left_on_failure(self, tmp_path, capsys):
        bad = tmp_path / "bad.wav"
        bad.write_bytes(b"RIFFxxxxWAVEgarbage!")
        out = tmp_path / "t.txt"
        main(["track", str(bad), "--out", str(out)])
        assert not out.exists()
        assert not list(tmp_path.glob("*.tmp"))

    def test_bad_thread_env(self, tone_wav, capsys, monkeypatch, tmp_path):
        monkeypatch.setenv("F0_NUM_THREADS", "zero")
        code = main(["track", str(tone_wav), "--out", str(tmp_path / "t.txt")])
        assert code == exit_code_for(ConfigError(""))


class TestFlagScope:
    def test_irrelevant_flag_warns(self, tone_wav, capsys, tmp_path):
        main(["track", str(tone_wav), "--method", "yin",
              "--silence-db", "-30", "--out", str(tmp_path / "t.txt")])
        err = capsys.readouterr().err
        assert "warning" in err
        assert "--silence-db" in err

    def test_relevant_flag_silent(self, tone_wav, capsys, tmp_path):
        main(["track", str(tone_wav), "--silence-db", "-30",
              "--out", str(tmp_path / "t.txt")])
        assert "warning" not in capsys.readouterr().err

    def test_yin_threshold_warns_for_specmax(self, tone_wav, capsys, tmp_path):
        main(["track", str(tone_wav), "--yin-threshold", "0.3",
              "--out", str(tmp_path / "t.txt")])
        assert "--yin-threshold" in capsys.readouterr().err


def test_parser_rejects_unknown_method():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["track", "x.wav", "--method", "praat"])
