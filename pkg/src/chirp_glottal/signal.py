"""Sample buffers, Blackman windowing and GCI-anchored framing."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.signal import find_peaks

from .errors import InvalidArgument, OutOfRange

MIN_PERIOD = 16


@dataclass(frozen=True)
class SampleBuffer:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1:
            raise InvalidArgument("samples must be one-dimensional")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise InvalidArgument(f"sample_rate must be a positive integer, got {self.sample_rate}")
        if not np.all(np.isfinite(samples)):
            raise InvalidArgument("samples contain NaN or Inf")
        samples = samples.copy()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self):
        return len(self.samples) / self.sample_rate


class GCISource(str, Enum):
    MARKER_FILE = "marker-file"
    EGG_DERIVED = "egg-derived"
    SYNTHETIC = "synthetic-ground-truth"


@dataclass(frozen=True)
class GCITrack:
    instants: np.ndarray
    source: GCISource = GCISource.MARKER_FILE

    def __post_init__(self):
        instants = np.asarray(self.instants, dtype=float).reshape(-1)
        if instants.size > 1 and np.any(np.diff(instants) <= 0):
            raise InvalidArgument("GCI instants must be strictly increasing")
        instants = instants.copy()
        instants.setflags(write=False)
        object.__setattr__(self, "instants", instants)
        object.__setattr__(self, "source", GCISource(self.source))

    def __len__(self):
        return len(self.instants)

    def check_within(self, buffer: SampleBuffer):
        if len(self) and (self.instants[0] < 0 or self.instants[-1] > len(buffer) - 1):
            raise OutOfRange("GCI instants fall outside the buffer")
        return self

    def local_period(self, index: int) -> int:
        """Local pitch period (samples) around ``instants[index]``.

        Half the span between the two flanking GCIs; the single neighbouring
        interval at either end of the track.
        """
        g = self.instants
        if len(g) < 2:
            raise InvalidArgument("at least two GCIs are needed to estimate a period")
        if index == 0:
            span = g[1] - g[0]
        elif index == len(g) - 1:
            span = g[-1] - g[-2]
        else:
            span = (g[index + 1] - g[index - 1]) / 2.0
        return int(round(span))


@dataclass(frozen=True)
class Frame:
    samples: np.ndarray
    window_length: int
    anchor: int
    nominal_gci_offset: float | None = None
    sample_rate: int | None = None
    raw: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or len(samples) != self.window_length:
            raise InvalidArgument("frame length must equal the window length")
        samples = samples.copy()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return len(self.samples)


def blackman_window(L: int) -> np.ndarray:
    """Blackman window ``0.42 - 0.5 cos(2 pi t/L) + 0.08 cos(4 pi t/L)``, t = 0..L-1.

    Evaluated in the factored form ``0.32 sin^2(pi t/L) (2.125 - cos(2 pi t/L))``
    so that w(0) is exactly zero and the endpoint does not suffer cancellation.
    Folding t onto min(t, L - t) makes w[t] == w[L - t] hold exactly.
    """
    if int(L) != L or L < 4:
        raise InvalidArgument(f"window length must be an integer >= 4, got {L}")
    L = int(L)
    t = np.arange(L, dtype=float)
    t = np.minimum(t, L - t)
    s = np.sin(np.pi * t / L)
    return 0.32 * s * s * (2.125 - np.cos(2.0 * np.pi * t / L))


def window_length_for_period(T0: float) -> int:
    """Twice the period, rounded to the nearest even integer."""
    return 2 * int(round(T0))


def extract_frame(buffer: SampleBuffer, gci: float, T0: float) -> Frame:
    """Blackman-windowed slice of length ~2*T0 centred on ``gci``."""
    if T0 < MIN_PERIOD:
        raise InvalidArgument(f"T0 must be at least {MIN_PERIOD} samples, got {T0}")
    L = window_length_for_period(T0)
    center = int(round(gci))
    start = center - L // 2
    if start < 0 or start + L > len(buffer):
        raise OutOfRange(
            f"window [{start}, {start + L}) exceeds buffer of length {len(buffer)}"
        )
    raw = buffer.samples[start:start + L]
    return Frame(
        samples=raw * blackman_window(L),
        window_length=L,
        anchor=start,
        sample_rate=buffer.sample_rate,
        raw=raw,
    )


def difference_egg(egg: SampleBuffer, delay_compensation: int = 0) -> SampleBuffer:
    """First difference of an EGG signal, shifted by ``delay_compensation`` samples.

    A positive delay moves the signal later in time. Samples shifted in are zero.
    """
    x = egg.samples
    n = len(x)
    if abs(delay_compensation) >= n:
        raise InvalidArgument("delay compensation must be shorter than the buffer")
    d = np.zeros(n)
    d[1:] = x[1:] - x[:-1]
    k = int(delay_compensation)
    if k > 0:
        d = np.concatenate([np.zeros(k), d[:-k]])
    elif k < 0:
        d = np.concatenate([d[-k:], np.zeros(-k)])
    return SampleBuffer(d, egg.sample_rate)


def gcis_from_diff_egg(degg: SampleBuffer, threshold_ratio: float = 0.3) -> GCITrack:
    """Pick GCIs as the dominant-polarity extrema of a differenced EGG.

    Returns an empty track when nothing exceeds the threshold.
    """
    x = degg.samples
    if x.size == 0 or not np.any(x):
        return GCITrack(np.empty(0), GCISource.EGG_DERIVED)
    polarity = 1.0 if x[np.argmax(np.abs(x))] > 0 else -1.0
    s = polarity * x
    height = threshold_ratio * s.max()
    # pad so extrema on the first/last sample are detectable
    floor = s.min() - 1.0
    padded = np.concatenate([[floor], s, [floor]])
    peaks, _ = find_peaks(padded, height=height)
    if len(peaks) > 2:
        distance = max(1, int(0.5 * np.median(np.diff(peaks))))
        peaks, _ = find_peaks(padded, height=height, distance=distance)
    return GCITrack(peaks - 1.0, GCISource.EGG_DERIVED)
