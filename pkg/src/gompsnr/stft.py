"""Short-time Fourier analysis with a periodic Hann window.

No window normalization is applied. Every metric built on top of this is a
ratio of spectral sums, so a global scale factor cancels out.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidConfig, ShapeMismatch, TooShort
from .signal_io import Waveform

__all__ = ["StftConfig", "ComplexSpectrogram", "MagPhase", "hann", "stft", "to_mag_phase", "frame_count"]


@dataclass(frozen=True)
class StftConfig:
    window_size: int = 1024
    hop_size: int = 256
    fft_size: int | None = None
    center: bool = True
    window: str = "hann"

    def __post_init__(self):
        if self.fft_size is None:
            object.__setattr__(self, "fft_size", self.window_size)
        w, h, n = self.window_size, self.hop_size, self.fft_size
        if w < 2 or w & (w - 1):
            raise InvalidConfig(f"window size must be a power of two, got {w}")
        if not 1 <= h <= w:
            raise InvalidConfig(f"hop size must be in [1, window size], got {h}")
        if n < w:
            raise InvalidConfig(f"fft size {n} smaller than window size {w}")
        if self.window != "hann":
            raise InvalidConfig(f"only the hann window is supported, got {self.window!r}")

    @property
    def n_bins(self) -> int:
        return self.fft_size // 2 + 1

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ComplexSpectrogram:
    """One-sided STFT, frames along axis 0 and bins along axis 1."""

    re: np.ndarray
    im: np.ndarray
    config: StftConfig

    def __post_init__(self):
        if self.re.shape != self.im.shape or self.re.ndim != 2:
            raise ShapeMismatch(f"re/im shapes differ: {self.re.shape} vs {self.im.shape}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.re.shape

    @property
    def complex(self) -> np.ndarray:
        return self.re + 1j * self.im

    @classmethod
    def from_complex(cls, values: np.ndarray, config: StftConfig) -> "ComplexSpectrogram":
        values = np.asarray(values)
        return cls(np.ascontiguousarray(values.real, dtype=np.float64), np.ascontiguousarray(values.imag, dtype=np.float64), config)


@dataclass(frozen=True)
class MagPhase:
    mag: np.ndarray
    phase: np.ndarray


def hann(n: int) -> np.ndarray:
    """Periodic Hann window ``0.5 - 0.5 cos(2 pi m / n)``."""
    m = np.arange(n)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * m / n)


def frame_count(n_samples: int, cfg: StftConfig) -> int:
    padded = n_samples + (2 * (cfg.window_size // 2) if cfg.center else 0)
    return 1 + (padded - cfg.window_size) // cfg.hop_size


def _pad(x: np.ndarray, cfg: StftConfig) -> np.ndarray:
    if not cfg.center:
        return x
    # numpy mirrors repeatedly when the signal is shorter than the pad width
    return np.pad(x, cfg.window_size // 2, mode="reflect")


def stft(w: Waveform | np.ndarray, cfg: StftConfig | None = None) -> ComplexSpectrogram:
    """Frame, window and FFT a waveform.

    With ``cfg.center`` the signal is reflect-padded by ``window_size // 2``
    on both sides; frame ``l`` then covers padded samples
    ``[l * hop, l * hop + window_size)``.
    """
    cfg = cfg or StftConfig()
    x = w.samples if isinstance(w, Waveform) else np.asarray(w, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeMismatch("stft expects a 1-D signal")
    if cfg.center and x.shape[0] < 1:
        raise TooShort("empty signal")
    if not cfg.center and x.shape[0] < cfg.window_size:
        raise TooShort(f"signal of {x.shape[0]} samples is shorter than the {cfg.window_size}-sample window")
    padded = _pad(x, cfg)
    n_frames = 1 + (padded.shape[0] - cfg.window_size) // cfg.hop_size
    frames = np.lib.stride_tricks.sliding_window_view(padded, cfg.window_size)[:: cfg.hop_size][:n_frames]
    spec = np.fft.rfft(frames * hann(cfg.window_size), n=cfg.fft_size, axis=1)
    return ComplexSpectrogram.from_complex(spec, cfg)


def to_mag_phase(S: ComplexSpectrogram) -> MagPhase:
    """Polar decomposition; phase lies in [-pi, pi) and is 0 where the magnitude is 0."""
    mag = np.hypot(S.re, S.im)
    phase = np.arctan2(S.im, S.re)
    # arctan2 returns +pi on the negative real axis; map it onto -pi
    phase = np.where(phase >= np.pi, -np.pi, phase)
    phase = np.where(mag == 0.0, 0.0, phase)
    return MagPhase(mag, phase)
