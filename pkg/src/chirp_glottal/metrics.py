"""Glottal formant, determination rate and spectral distortion."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument

FG_CAP_HZ = 1000.0
FG_HINT_MULTIPLE = 8.0
DETERMINATION_THRESHOLD = 0.20
SD_FLOOR = 1e-5
SD_MIN_BINS = 8


@dataclass
class MetricsReport:
    strategy: str
    Fg_est: float
    Fg_ref: float
    spectral_distortion: float
    condition: dict = field(default_factory=dict)
    radius: float = float("nan")
    n_anticausal: int = 0
    residual_max: float = float("nan")
    gap_width: float | None = None
    wave_correlation: float = float("nan")
    completeness_error: float = float("nan")
    warnings: tuple = ()
    error: str | None = None

    @property
    def Fg_rel_error(self):
        return relative_error(self.Fg_est, self.Fg_ref)

    @property
    def determined(self):
        return is_determined(self.Fg_rel_error)


def relative_error(estimate, reference):
    if not (np.isfinite(estimate) and np.isfinite(reference)) or reference == 0:
        return float("nan")
    return abs(estimate - reference) / abs(reference)


def is_determined(rel_error):
    """Strictly below the 20 % threshold; NaN (undefined Fg) is never determined."""
    return bool(np.isfinite(rel_error) and rel_error < DETERMINATION_THRESHOLD)


def fg_search_limit(F0_hint, cap=FG_CAP_HZ):
    return min(FG_HINT_MULTIPLE * F0_hint, cap)


def glottal_formant_frequency(spectrum, sample_rate, F0_hint, cap=FG_CAP_HZ):
    """Frequency (Hz) of the magnitude peak in (0, min(8 F0, cap)].

    The peak is refined by a parabola through the log magnitudes of the three
    bins around it. Returns NaN for a flat spectrum.
    """
    mag = np.abs(np.asarray(spectrum))
    K = len(mag)
    if K < 4 or not np.any(mag):
        return float("nan")
    df = sample_rate / K
    kmax = min(int(np.floor(fg_search_limit(F0_hint, cap) / df + 1e-9)), K // 2 - 1)
    if kmax < 1:
        return float("nan")
    band = mag[1:kmax + 1]
    if np.ptp(band) <= 1e-12 * band.max():
        return float("nan")
    k = 1 + int(np.argmax(band))
    with np.errstate(divide="ignore"):
        a, b, c = np.log(mag[k - 1:k + 2])
    shift = 0.0
    denom = a - 2.0 * b + c
    if np.isfinite(denom) and denom < 0:
        shift = float(np.clip(0.5 * (a - c) / denom, -0.5, 0.5))
    return (k + shift) * df


def reference_Fg(condition, K=4096, windowed=True):
    """Fg of the reference open-phase LF segment for ``condition`` on a K-point grid.

    Uses the same estimator as the decomposition output. See
    ``synth.reference_open_phase`` for ``windowed``.
    """
    from .synth import reference_open_phase

    wave = reference_open_phase(condition, windowed)
    return glottal_formant_frequency(np.fft.fft(wave, K), condition.sample_rate, condition.lf.F0)


def determination_rate(reports):
    """Percentage of frames whose Fg relative error is below 20 %.

    Accepts MetricsReport objects or bare relative errors.
    """
    reports = list(reports)
    if not reports:
        raise InvalidArgument("determination rate of an empty collection")
    hits = sum(
        r.determined if isinstance(r, MetricsReport) else is_determined(float(r)) for r in reports
    )
    return 100.0 * hits / len(reports)


def spectral_distortion(reference_wave, estimated_wave, K=None, normalize=True):
    """RMS log-spectral distance (dB) between two waves over 0 < omega <= pi.

    Bins where either magnitude sits more than 100 dB below its own peak are
    ignored. With ``normalize`` the mean log ratio is removed first so that
    only spectral shape counts. Returns NaN when fewer than 8 bins remain.
    """
    x = np.asarray(reference_wave, dtype=float)
    y = np.asarray(estimated_wave, dtype=float)
    if not np.any(x) or not np.any(y):
        raise InvalidArgument("spectral distortion needs two non-zero waves")
    if K is None:
        K = max(4096, 1 << int(np.ceil(np.log2(max(len(x), len(y))))))
    X = np.abs(np.fft.rfft(x, K))[1:K // 2 + 1]
    Y = np.abs(np.fft.rfft(y, K))[1:K // 2 + 1]
    valid = (X >= SD_FLOOR * X.max()) & (Y >= SD_FLOOR * Y.max())
    if valid.sum() < SD_MIN_BINS:
        return float("nan")
    d = 20.0 * (np.log10(X[valid]) - np.log10(Y[valid]))
    if normalize:
        d = d - d.mean()
    return float(np.sqrt(np.mean(d * d)))


def normalized_cross_correlation(reference, estimate):
    """Peak of the normalised cross-correlation over all lags (sign-insensitive)."""
    x = np.asarray(reference, dtype=float)
    y = np.asarray(estimate, dtype=float)
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        return 0.0
    xc = np.correlate(y, x, mode="full")
    return float(np.max(np.abs(xc)) / (nx * ny))
