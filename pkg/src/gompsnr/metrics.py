"""Time-domain SNR and the T-F SNR family (SNR, OMPSNR, GOMPSNR).

The T-F scores share one template,

    10 log10( sum |Y|^2 / sum(|Y|^2 + |Yh|^2 + C) )

and differ only in the per-bin correlation component ``C``:

    snr      -2 |Y||Yh| cos(theta - theta_h)
    ompsnr   -(2/9) |Y||Yh| sum_i cos(d_i theta - d_i theta_h)
    gompsnr  (2/9) |Y||Yh| sum_i (f_AW(d_i theta - d_i theta_h) / pi - 1)

where ``d_i`` are the nine omnidirectional phase derivative channels. All
bins, DC and Nyquist included, carry equal weight. Sums are exactly rounded
(``math.fsum``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import GompsnrError, InvalidConfig, ShapeMismatch, SilentReference
from .omniphase import anti_wrap, omni_derivatives
from .signal_io import Waveform, align_pair
from .stft import ComplexSpectrogram, StftConfig, stft, to_mag_phase

__all__ = [
    "Kind",
    "MetricReport",
    "METRIC_NAMES",
    "snr_time",
    "correlation_component",
    "tf_energies",
    "snr_family",
    "snr_family_from_spectra",
    "score_pair",
    "aggregate",
    "ratio_db",
]

DEFAULT_EPS = 1e-12
METRIC_NAMES = ("snr_time_db", "snr_tf_db", "ompsnr_db", "gompsnr_db")


class Kind(str, Enum):
    SNR = "snr"
    OMPSNR = "ompsnr"
    GOMPSNR = "gompsnr"


@dataclass
class MetricReport:
    id: str
    snr_time_db: float
    snr_tf_db: float
    ompsnr_db: float
    gompsnr_db: float
    settings: dict
    # (numerator, denominator) energies per metric, kept for pooled aggregation
    energies: dict = field(default_factory=dict, repr=False, compare=False)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "snr_time_db": self.snr_time_db,
            "snr_tf_db": self.snr_tf_db,
            "ompsnr_db": self.ompsnr_db,
            "gompsnr_db": self.gompsnr_db,
            "settings": self.settings,
        }


def _fsum(a) -> float:
    return math.fsum(np.asarray(a, dtype=np.float64).ravel())


def ratio_db(num: float, den: float, eps: float = DEFAULT_EPS) -> float:
    """``10 log10(num / max(den, 0))`` with +inf once ``den`` drops below ``eps * num``."""
    den = max(den, 0.0)
    if den < eps * num or den == 0.0:
        return math.inf
    return 10.0 * math.log10(num / den)


def snr_time(ref: Waveform, est: Waveform) -> float:
    """Waveform SNR in dB; +inf when the residual is exactly zero."""
    y = ref.samples if isinstance(ref, Waveform) else np.asarray(ref, dtype=np.float64)
    yh = est.samples if isinstance(est, Waveform) else np.asarray(est, dtype=np.float64)
    if y.shape != yh.shape:
        raise ShapeMismatch(f"signal lengths differ: {y.shape} vs {yh.shape}")
    num = _fsum(y * y)
    if num == 0.0:
        raise SilentReference("reference signal has zero energy")
    resid = y - yh
    den = _fsum(resid * resid)
    if den == 0.0:
        return math.inf
    return 10.0 * math.log10(num / den)


def correlation_component(kind, mag_ref, mag_est, ref, est) -> np.ndarray:
    """Per-bin correlation component ``C`` of the requested kind.

    Args:
        kind: ``Kind`` or its string value.
        mag_ref, mag_est: (L, K) magnitude grids.
        ref, est: for ``snr`` the (L, K) phase grids. For ``ompsnr`` and
            ``gompsnr`` either (9, L, K) derivative stacks or raw (L, K)
            phase grids, which are then differentiated here.
    """
    kind = Kind(kind)
    mag_ref = np.asarray(mag_ref, dtype=np.float64)
    mag_est = np.asarray(mag_est, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    est = np.asarray(est, dtype=np.float64)
    if mag_ref.shape != mag_est.shape:
        raise ShapeMismatch(f"magnitude grids differ: {mag_ref.shape} vs {mag_est.shape}")
    cross = mag_ref * mag_est
    if kind is Kind.SNR:
        if ref.shape != mag_ref.shape or est.shape != mag_ref.shape:
            raise ShapeMismatch("phase grids must match the magnitude grids")
        return -2.0 * cross * np.cos(ref - est)
    if ref.ndim == 2:
        ref = omni_derivatives(ref)
    if est.ndim == 2:
        est = omni_derivatives(est)
    if ref.shape != est.shape or ref.shape[1:] != mag_ref.shape or ref.shape[0] != 9:
        raise ShapeMismatch(f"derivative stacks {ref.shape}/{est.shape} do not match grid {mag_ref.shape}")
    diff = ref - est
    if kind is Kind.OMPSNR:
        return -(2.0 / 9.0) * cross * np.cos(diff).sum(axis=0)
    return (2.0 / 9.0) * cross * (anti_wrap(diff) / np.pi - 1.0).sum(axis=0)


def tf_energies(mag_ref, mag_est, C) -> tuple[float, float]:
    """Return ``(sum |Y|^2, sum(|Y|^2 + |Yh|^2 + C))``."""
    mag_ref = np.asarray(mag_ref)
    mag_est = np.asarray(mag_est)
    p_ref = mag_ref * mag_ref
    return _fsum(p_ref), _fsum(p_ref + mag_est * mag_est + C)


def snr_family_from_spectra(S_ref, S_est, kind, eps: float = DEFAULT_EPS) -> float:
    """T-F score from precomputed spectrograms (``ComplexSpectrogram`` or complex arrays)."""
    mp_ref = _mag_phase(S_ref)
    mp_est = _mag_phase(S_est)
    if mp_ref[0].shape != mp_est[0].shape:
        raise ShapeMismatch(f"spectrogram shapes differ: {mp_ref[0].shape} vs {mp_est[0].shape}")
    C = correlation_component(kind, mp_ref[0], mp_est[0], mp_ref[1], mp_est[1])
    num, den = tf_energies(mp_ref[0], mp_est[0], C)
    if num == 0.0:
        raise SilentReference("reference spectrogram has zero energy")
    return ratio_db(num, den, eps)


def _mag_phase(S):
    if not isinstance(S, ComplexSpectrogram):
        S = ComplexSpectrogram.from_complex(np.asarray(S, dtype=np.complex128), StftConfig())
    mp = to_mag_phase(S)
    return mp.mag, mp.phase


def snr_family(ref: Waveform, est: Waveform, kind, cfg: StftConfig | None = None, eps: float = DEFAULT_EPS) -> float:
    """SNR, OMPSNR or GOMPSNR in dB between two aligned waveforms."""
    cfg = cfg or StftConfig()
    if len(ref) != len(est):
        raise ShapeMismatch(f"signal lengths differ: {len(ref)} vs {len(est)}")
    return snr_family_from_spectra(stft(ref, cfg), stft(est, cfg), kind, eps)


def score_pair(
    ref: Waveform,
    est: Waveform,
    cfg: StftConfig | None = None,
    eps: float = DEFAULT_EPS,
    align: str = "strict",
    pair_id: str = "",
) -> MetricReport:
    """All four scores for one pair, from a single STFT per signal.

    Errors raised below are re-raised with ``pair_id`` attached.
    """
    cfg = cfg or StftConfig()
    try:
        ref, est = align_pair(ref, est, align, min_length=cfg.window_size)
        energies = {}
        y, yh = ref.samples, est.samples
        resid = y - yh
        energies["snr_time_db"] = (_fsum(y * y), _fsum(resid * resid))
        if energies["snr_time_db"][0] == 0.0:
            raise SilentReference("reference signal has zero energy")
        mp_ref = to_mag_phase(stft(ref, cfg))
        mp_est = to_mag_phase(stft(est, cfg))
        d_ref = omni_derivatives(mp_ref.phase)
        d_est = omni_derivatives(mp_est.phase)
        for name, kind, a, b in (
            ("snr_tf_db", Kind.SNR, mp_ref.phase, mp_est.phase),
            ("ompsnr_db", Kind.OMPSNR, d_ref, d_est),
            ("gompsnr_db", Kind.GOMPSNR, d_ref, d_est),
        ):
            C = correlation_component(kind, mp_ref.mag, mp_est.mag, a, b)
            energies[name] = tf_energies(mp_ref.mag, mp_est.mag, C)
        if energies["snr_tf_db"][0] == 0.0:
            raise SilentReference("reference spectrogram has zero energy")
    except GompsnrError as exc:
        if exc.pair_id is None:
            exc.pair_id = pair_id
        raise
    num, den = energies["snr_time_db"]
    scores = {"snr_time_db": math.inf if den == 0.0 else 10.0 * math.log10(num / den)}
    for name in METRIC_NAMES[1:]:
        scores[name] = ratio_db(*energies[name], eps)
    settings = cfg.to_dict()
    settings["eps"] = eps
    settings["align"] = align
    return MetricReport(pair_id, settings=settings, energies=energies, **scores)


def aggregate(reports: Sequence[MetricReport], mode: str = "mean_db", eps: float = DEFAULT_EPS) -> dict:
    """Corpus-level summary per metric.

    ``mean_db`` averages the finite per-pair dB values; ``pooled`` sums
    numerator and denominator energies over all pairs first. A value that
    cannot be formed (no finite scores) is ``None``.
    """
    if mode not in ("mean_db", "pooled"):
        raise InvalidConfig(f"unknown aggregation {mode!r}")
    out = {}
    for name in METRIC_NAMES:
        values = [getattr(r, name) for r in reports]
        finite = [v for v in values if math.isfinite(v)]
        n_inf = len(values) - len(finite)
        if mode == "mean_db":
            value = math.fsum(finite) / len(finite) if finite else None
        else:
            nums = [r.energies[name][0] for r in reports]
            dens = [r.energies[name][1] for r in reports]
            if not reports:
                value = None
            else:
                num = math.fsum(nums)
                den = math.fsum(max(d, 0.0) for d in dens)
                value = ratio_db(num, den, 0.0 if name == "snr_time_db" else eps)
        out[name] = {"value": value, "n_finite": len(finite), "n_infinite": n_inf}
    return out
