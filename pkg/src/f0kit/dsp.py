"""Short-time Fourier analysis: framing, magnitude spectrogram, RMS envelope.

Conventions used throughout the package:

* frame ``j`` covers samples ``[j*hop, j*hop + window_size)``; trailing
  samples that do not fill a frame are dropped,
* frame count is ``floor((n_samples - window_size) / hop) + 1``,
* frame ``j`` is centred at ``(j*hop + window_size/2) / fs`` seconds,
* magnitudes are ``|one-sided DFT|`` of the windowed frame, with no log
  scaling and no normalization by the window sum. The tracker only compares
  magnitudes against per-clip maxima, so the absolute scale convention is
  free; this one keeps a full-scale bin-centred sine at magnitude N/2 under
  a rectangular window.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .audio_io import AudioClip, require_mono
from .errors import ClipTooShortError, ConfigError

WINDOW_FUNCTIONS = ("hann", "hamming", "rectangular")


@dataclass(frozen=True)
class SpectrogramConfig:
    """Window size, overlap and window function for short-time analysis.

    ``overlap`` is in samples; ``None`` means 50% (``window_size // 2``).
    Hop is derived as ``window_size - overlap``. The 1024/512 default gives
    23.2 ms frames and 43.07 Hz bins at 44.1 kHz, fine enough to separate
    syllables repeating at up to 30 Hz.
    """

    window_size: int = 1024
    overlap: int | None = None
    window_function: str = "hann"

    def __post_init__(self):
        ws = self.window_size
        if ws < 16 or ws & (ws - 1) != 0:
            raise ConfigError(f"window_size must be a power of two >= 16, got {ws}")
        if self.overlap is None:
            object.__setattr__(self, "overlap", ws // 2)
        if not 0 <= self.overlap < ws:
            raise ConfigError(f"overlap must satisfy 0 <= overlap < window_size, got {self.overlap}")
        if self.window_function not in WINDOW_FUNCTIONS:
            raise ConfigError(
                f"window_function must be one of {WINDOW_FUNCTIONS}, got {self.window_function!r}"
            )

    @property
    def hop(self) -> int:
        return self.window_size - self.overlap

    def window_array(self) -> np.ndarray:
        if self.window_function == "hann":
            return np.hanning(self.window_size)
        if self.window_function == "hamming":
            return np.hamming(self.window_size)
        return np.ones(self.window_size)


@dataclass(frozen=True)
class Spectrogram:
    """Magnitude matrix over (frequency bin x time frame) with axis vectors."""

    magnitudes: np.ndarray  # (n_freq_bins, n_frames), nonnegative
    freq_bins: np.ndarray  # Hz, ascending; bin k sits at k*fs/window_size
    frame_times: np.ndarray  # seconds, frame centres
    sample_rate: int

    def __post_init__(self):
        for name in ("magnitudes", "freq_bins", "frame_times"):
            arr = getattr(self, name)
            arr.setflags(write=False)

    @property
    def n_frames(self) -> int:
        return self.magnitudes.shape[1]

    @property
    def bin_width(self) -> float:
        """Frequency spacing of DFT bins in Hz."""
        return float(self.freq_bins[1] - self.freq_bins[0])


@dataclass(frozen=True)
class Envelope:
    """Per-frame RMS amplitude on the same frame grid as the spectrogram."""

    values: np.ndarray
    frame_times: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)
        self.frame_times.setflags(write=False)

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]


def frame_signal(samples: np.ndarray, window_size: int, hop: int) -> np.ndarray:
    """View of ``samples`` as overlapping rows of length ``window_size``.

    Returns shape ``(n_frames, window_size)`` with
    ``n_frames = (len(samples) - window_size) // hop + 1``; the tail that
    does not fill a frame is dropped rather than zero-padded, avoiding a
    biased low-energy trailing frame.
    """
    if len(samples) < window_size:
        raise ClipTooShortError(
            f"clip has {len(samples)} samples, need at least {window_size}"
        )
    return sliding_window_view(samples, window_size)[::hop]


def frame_times(n_frames: int, config: SpectrogramConfig, sample_rate: int) -> np.ndarray:
    offsets = np.arange(n_frames) * config.hop + config.window_size / 2
    return offsets / sample_rate


def spectrogram(clip: AudioClip, config: SpectrogramConfig | None = None) -> Spectrogram:
    """Magnitude spectrogram of a mono clip.

    Each frame is multiplied by the window function and transformed; the
    result holds absolute values of the one-sided DFT, so there are
    ``window_size/2 + 1`` bins from 0 Hz up to the Nyquist frequency.

    Raises:
        NonMonoError: clip has more than one channel.
        ClipTooShortError: fewer samples than ``window_size``.
    """
    config = config or SpectrogramConfig()
    samples = require_mono(clip).samples
    frames = frame_signal(samples, config.window_size, config.hop)
    mags = np.abs(np.fft.rfft(frames * config.window_array(), axis=1)).T
    freq_bins = np.arange(mags.shape[0]) * (clip.sample_rate / config.window_size)
    return Spectrogram(
        magnitudes=mags,
        freq_bins=freq_bins,
        frame_times=frame_times(mags.shape[1], config, clip.sample_rate),
        sample_rate=clip.sample_rate,
    )


def envelope(clip: AudioClip, config: SpectrogramConfig | None = None) -> Envelope:
    """Per-frame RMS level of the raw (unwindowed) samples.

    Uses the identical frame grid as :func:`spectrogram` under the same
    config, so the tracker can gate spectrogram columns by envelope level
    without resampling.
    """
    config = config or SpectrogramConfig()
    samples = require_mono(clip).samples
    frames = frame_signal(samples, config.window_size, config.hop)
    values = np.sqrt(np.mean(np.square(frames), axis=1))
    return Envelope(
        values=values,
        frame_times=frame_times(len(values), config, clip.sample_rate),
    )
