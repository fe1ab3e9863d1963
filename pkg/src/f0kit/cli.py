"""Batch command-line front end.

``f0 track`` runs the full pipeline per input file: load, downmix,
spectrogram + envelope, the selected pitch method, then table (and optional
plot) export. Files are processed by a bounded thread pool and every output
is written atomically, so a crashed run never leaves a truncated table
behind. Each error class maps to its own exit code; see _EXIT_CODES.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .audio_io import downmix, load_wav
from .baselines import BASELINES, BaselineConfig
from .dsp import WINDOW_FUNCTIONS, SpectrogramConfig, envelope, spectrogram
from .errors import (
    AliasingError,
    AmplitudeOverflowError,
    ClipTooShortError,
    ConfigError,
    EmptyAudioError,
    EmptyBandError,
    F0KitError,
    FrameGridMismatchError,
    MalformedHeaderError,
    NonMonoError,
    UnsupportedEncodingError,
)
from .export import export_table, render_plot
from .tracker import TrackerConfig, track

METHODS = ("specmax", "acf", "yin", "cepstrum")

_EXIT_CODES = (
    (ConfigError, 2),
    (MalformedHeaderError, 3),
    (UnsupportedEncodingError, 4),
    (EmptyAudioError, 5),
    (ClipTooShortError, 6),
    (NonMonoError, 7),
    (FrameGridMismatchError, 8),
    (EmptyBandError, 9),
    (AliasingError, 10),
    (AmplitudeOverflowError, 11),
    (F0KitError, 12),
    (OSError, 13),
)

# which flags matter for which method, for ignored-flag warnings
_FLAG_SCOPE = {
    "window": ("specmax",),
    "overlap": ("specmax",),
    "window_fn": ("specmax",),
    "silence_db": ("specmax",),
    "peak_db": ("specmax",),
    "refine": ("specmax",),
    "frame_size": ("acf", "yin", "cepstrum"),
    "hop": ("acf", "yin", "cepstrum"),
    "yin_threshold": ("yin",),
}


def exit_code_for(exc: BaseException) -> int:
    for klass, code in _EXIT_CODES:
        if isinstance(exc, klass):
            return code
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="f0", description="Fundamental-frequency estimation for tonal sounds."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("track", help="estimate f0 tables (and plots) for WAV files")
    p.add_argument("inputs", nargs="+", help="input WAV files")
    p.add_argument("--method", choices=METHODS, default="specmax")
    p.add_argument("--fmin", type=float, default=None, metavar="HZ",
                   help="lower band edge (default 800)")
    p.add_argument("--fmax", type=float, default=None, metavar="HZ",
                   help="upper band edge (default 8000)")
    p.add_argument("--window", type=int, default=None, metavar="N",
                   help="spectrogram window size in samples, power of two (default 1024)")
    p.add_argument("--overlap", type=int, default=None, metavar="N",
                   help="spectrogram overlap in samples (default window/2)")
    p.add_argument("--window-fn", choices=WINDOW_FUNCTIONS, default=None,
                   help="spectrogram window function (default hann)")
    p.add_argument("--silence-db", type=float, default=None, metavar="DB",
                   help="silence gate relative to max envelope (default -40)")
    p.add_argument("--peak-db", type=float, default=None, metavar="DB",
                   help="peak gate relative to max magnitude (default -45)")
    p.add_argument("--refine", action="store_true", default=None,
                   help="parabolic refinement of the spectral peak")
    p.add_argument("--frame-size", type=int, default=None, metavar="N",
                   help="baseline frame size in samples (default 2048)")
    p.add_argument("--hop", type=int, default=None, metavar="N",
                   help="baseline hop in samples (default 512)")
    p.add_argument("--yin-threshold", type=float, default=None, metavar="X",
                   help="voicing threshold for the yin method (default 0.15)")
    p.add_argument("--out", default=None, metavar="PATH",
                   help="table destination; a directory when given several inputs")
    p.add_argument("--plot", default=None, metavar="PATH",
                   help="SVG destination; a directory when given several inputs")
    p.add_argument("--dump-config", action="store_true",
                   help="print the fully resolved configuration before running")
    p.add_argument("-v", "--verbose", action="store_true",
                   help="report per-file progress on stderr")
    return parser


@dataclass(frozen=True)
class _Resolved:
    method: str
    spectro: SpectrogramConfig
    tracker: TrackerConfig
    baseline: BaselineConfig


def _resolve(args) -> _Resolved:
    for flag, methods in _FLAG_SCOPE.items():
        if getattr(args, flag) is not None and args.method not in methods:
            print(
                f"f0: warning: --{flag.replace('_', '-')} has no effect with "
                f"method {args.method}",
                file=sys.stderr,
            )
    spectro = SpectrogramConfig(
        window_size=args.window if args.window is not None else 1024,
        overlap=args.overlap,
        window_function=args.window_fn if args.window_fn is not None else "hann",
    )
    tracker_kwargs = {}
    if args.fmin is not None:
        tracker_kwargs["f_min"] = args.fmin
    if args.fmax is not None:
        tracker_kwargs["f_max"] = args.fmax
    if args.silence_db is not None:
        tracker_kwargs["silence_threshold_db"] = args.silence_db
    if args.peak_db is not None:
        tracker_kwargs["peak_threshold_db"] = args.peak_db
    if args.refine is not None:
        tracker_kwargs["refine_peak"] = args.refine
    tracker_cfg = TrackerConfig(**tracker_kwargs)
    baseline_kwargs = {}
    if args.frame_size is not None:
        baseline_kwargs["frame_size"] = args.frame_size
    if args.hop is not None:
        baseline_kwargs["hop"] = args.hop
    if args.fmin is not None:
        baseline_kwargs["f_min"] = args.fmin
    if args.fmax is not None:
        baseline_kwargs["f_max"] = args.fmax
    if args.yin_threshold is not None:
        baseline_kwargs["yin_threshold"] = args.yin_threshold
    baseline_cfg = BaselineConfig(**baseline_kwargs)
    return _Resolved(args.method, spectro, tracker_cfg, baseline_cfg)


def _dump_config(resolved: _Resolved) -> None:
    print(f"method={resolved.method}")
    for prefix, cfg in (("spectrogram", resolved.spectro),
                        ("tracker", resolved.tracker),
                        ("baseline", resolved.baseline)):
        for name, value in sorted(vars(cfg).items()):
            print(f"{prefix}.{name}={value}")


def _destination(base: str | None, input_path: Path, suffix: str,
                 multi: bool) -> Path:
    """Pick the output path for one input.

    With several inputs (or when the target is a directory) ``base`` names a
    directory and each file gets ``<stem><suffix>`` inside it.
    """
    if base is None:
        return input_path.with_name(input_path.stem + suffix)
    base_path = Path(base)
    if multi or base_path.is_dir() or str(base).endswith(os.sep):
        base_path.mkdir(parents=True, exist_ok=True)
        return base_path / (input_path.stem + suffix)
    return base_path


def _atomic_write(path: Path, write_to_tmp) -> None:
    fd, tmp_name = tempfile.mkstemp(dir=str(path.parent) or ".",
                                    prefix=path.name + ".", suffix=".tmp")
    os.close(fd)
    try:
        write_to_tmp(tmp_name)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def _process_one(input_name: str, resolved: _Resolved, table_path: Path,
                 plot_path: Path | None, verbose: bool) -> str:
    started = time.perf_counter()
    clip = downmix(load_wav(input_name))
    spec = spectrogram(clip, resolved.spectro)
    env = envelope(clip, resolved.spectro)
    if resolved.method == "specmax":
        result = track(spec, env, resolved.tracker)
    else:
        result = BASELINES[resolved.method](clip, resolved.baseline)

    def write_table(tmp_name: str) -> None:
        with open(tmp_name, "w", encoding="utf-8", newline="\n") as fh:
            export_table(result, fh)

    _atomic_write(table_path, write_table)
    if plot_path is not None:
        _atomic_write(plot_path, lambda tmp: render_plot(spec, result, env, tmp))
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    if verbose:
        print(f"f0: {input_name} -> {table_path}"
              + (f" + {plot_path}" if plot_path else ""), file=sys.stderr)
    return (f"{input_name}: frames={result.n_frames} "
            f"voiced={100.0 * result.voiced_fraction():.1f}% "
            f"elapsed={elapsed_ms:.1f} ms")


def _worker_count(n_inputs: int) -> int:
    raw = os.environ.get("F0_NUM_THREADS", "")
    if raw.strip():
        try:
            limit = int(raw)
        except ValueError:
            raise ConfigError(f"F0_NUM_THREADS must be an integer, got {raw!r}")
        if limit < 1:
            raise ConfigError("F0_NUM_THREADS must be at least 1")
    else:
        limit = os.cpu_count() or 1
    return max(1, min(limit, n_inputs))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        resolved = _resolve(args)
        workers = _worker_count(len(args.inputs))
    except ConfigError as exc:
        print(f"f0: error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    if args.dump_config:
        _dump_config(resolved)

    multi = len(args.inputs) > 1
    jobs = []
    for name in args.inputs:
        input_path = Path(name)
        table_path = _destination(args.out, input_path, ".f0.txt", multi)
        plot_path = (_destination(args.plot, input_path, ".f0.svg", multi)
                     if args.plot is not None else None)
        jobs.append((name, table_path, plot_path))

    status = 0
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_process_one, name, resolved, table_path, plot_path,
                        args.verbose)
            for name, table_path, plot_path in jobs
        ]
        for (name, _, _), future in zip(jobs, futures):
            try:
                print(future.result())
            except Exception as exc:
                print(f"f0: {name}: {type(exc).__name__}: {exc}", file=sys.stderr)
                if status == 0:
                    status = exit_code_for(exc)
    return status


if __name__ == "__main__":
    sys.exit(main())
