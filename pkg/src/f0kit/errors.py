"""Exception types raised across the toolkit.

Everything derives from :class:`F0KitError` so callers can catch one base
class; the command line maps each subclass to a distinct exit code.
"""


class F0KitError(Exception):
    """Base class for all errors raised by this package."""


class MalformedHeaderError(F0KitError):
    """File is not a well-formed RIFF/WAVE container (bad magic, truncated chunks)."""


class UnsupportedEncodingError(F0KitError):
    """WAV encoding other than 16-bit PCM or 32-bit IEEE float."""


class EmptyAudioError(F0KitError):
    """Audio file decodes to zero frames."""


class ClipTooShortError(F0KitError):
    """Clip has fewer samples than one analysis frame."""


class NonMonoError(F0KitError):
    """Operation requires a mono clip."""


class FrameGridMismatchError(F0KitError):
    """Spectrogram and envelope were computed on different frame grids."""


class EmptyBandError(F0KitError):
    """No frequency bins fall inside the configured [f_min, f_max] band."""


class AliasingError(F0KitError):
    """A synthesis spec requests a frequency at or above the Nyquist limit."""


class AmplitudeOverflowError(F0KitError):
    """Synthesized signal exceeds full scale after mixing."""


class ConfigError(F0KitError):
    """Configuration values violate an invariant (e.g. f_min >= f_max)."""
