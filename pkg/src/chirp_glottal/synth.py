"""Synthetic vowels: LF pulse trains through all-pole formant filters."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import InvalidArgument
from .lf import DEFAULT_QA, LFParams, closure_instant, lf_pulse, open_phase
from .signal import GCISource, GCITrack, SampleBuffer, blackman_window, window_length_for_period

DEFAULT_SAMPLE_RATE = 16000
DEFAULT_PERIODS = 10

# Adult male formants (Hz) and bandwidths (Hz), four resonances per vowel.
FORMANTS = {
    "a": ((730, 80), (1090, 90), (2440, 120), (3400, 175)),
    "e": ((530, 80), (1840, 100), (2480, 120), (3400, 175)),
    "i": ((270, 80), (2290, 100), (3010, 150), (3700, 200)),
    "u": ((300, 80), (870, 90), (2240, 120), (3400, 175)),
}
VOWELS = tuple(FORMANTS)


@dataclass(frozen=True)
class TestCondition:
    lf: LFParams
    vowel: str
    gci_error: float
    sample_rate: int = DEFAULT_SAMPLE_RATE

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.vowel not in FORMANTS:
            raise InvalidArgument(f"unknown vowel {self.vowel!r}")
        if not -0.5 - 1e-12 <= self.gci_error <= 0.5 + 1e-12:
            raise InvalidArgument(f"gci_error {self.gci_error} outside [-0.5, 0.5]")

    @property
    def T0(self):
        return period_samples(self.lf.F0, self.sample_rate)

    def key(self):
        return dict(
            Oq=self.lf.Oq,
            alpha_m=self.lf.alpha_m,
            F0=self.lf.F0,
            vowel=self.vowel,
            gci_error=self.gci_error,
        )


@dataclass(frozen=True)
class SyntheticUtterance:
    speech: SampleBuffer
    true_glottal_derivative: SampleBuffer
    true_gcis: GCITrack
    condition: TestCondition


def period_samples(F0, sample_rate):
    return int(round(sample_rate / F0))


def resonator(freq, bandwidth, sample_rate):
    """Denominator of a unit-DC-gain two-pole resonator."""
    r = np.exp(-np.pi * bandwidth / sample_rate)
    theta = 2.0 * np.pi * freq / sample_rate
    return np.array([1.0, -2.0 * r * np.cos(theta), r * r])


def vowel_filter(vowel, sample_rate=DEFAULT_SAMPLE_RATE):
    """All-pole cascade ``(b, a)`` for one of the built-in vowels.

    Formants at or above Nyquist are skipped. ``b`` makes the DC gain one.
    """
    if vowel not in FORMANTS:
        raise InvalidArgument(f"unknown vowel {vowel!r}; expected one of {VOWELS}")
    a = np.array([1.0])
    for freq, bw in FORMANTS[vowel]:
        if freq < sample_rate / 2:
            a = np.convolve(a, resonator(freq, bw, sample_rate))
    b = np.array([np.sum(a)])
    return b, a


def synthesize(condition: TestCondition, duration_periods=DEFAULT_PERIODS) -> SyntheticUtterance:
    if duration_periods < 4:
        raise InvalidArgument("need at least four periods")
    T0 = condition.T0
    pulse = lf_pulse(condition.lf, T0)
    glottal = np.tile(pulse, duration_periods)
    b, a = vowel_filter(condition.vowel, condition.sample_rate)
    speech = lfilter(b, a, glottal)
    te = closure_instant(condition.lf, T0)
    gcis = te + T0 * np.arange(duration_periods)
    fs = condition.sample_rate
    return SyntheticUtterance(
        speech=SampleBuffer(speech, fs),
        true_glottal_derivative=SampleBuffer(glottal, fs),
        true_gcis=GCITrack(gcis.astype(float), GCISource.SYNTHETIC),
        condition=condition,
    )


def reference_open_phase(condition: TestCondition, windowed=True):
    """Open-phase LF segment ending at the GCI.

    With ``windowed`` the segment is weighted by the part of the analysis
    window it falls under when the window is centred on the GCI, i.e. the
    anticausal component an exact decomposition of that frame would return.
    """
    T0 = condition.T0
    seg = open_phase(condition.lf, T0)
    if windowed:
        seg = seg * blackman_window(window_length_for_period(T0))[T0 - len(seg) + 1:T0 + 1]
    return seg


def perturbed_gci(true_gci, gci_error, T0):
    """Analysis instant displaced by a fraction of the period."""
    if abs(gci_error) > 0.5 + 1e-12:
        raise InvalidArgument("gci_error must lie in [-0.5, 0.5]")
    return true_gci + int(round(gci_error * T0))


# --- test-condition grids --------------------------------------------------


def parse_range(spec, scale=1.0):
    """Values of a ``start:step:stop`` range (stop included) or a comma list."""
    spec = str(spec).strip()
    try:
        if ":" in spec:
            start, step, stop = (float(p) for p in spec.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            vals = start + step * np.arange(count)
        else:
            vals = np.array([float(p) for p in spec.split(",") if p.strip()])
    except ValueError:
        raise InvalidArgument(f"invalid range {spec!r}; expected start:step:stop") from None
    if vals.size == 0:
        raise InvalidArgument(f"empty range {spec!r}")
    return tuple(float(v) for v in np.round(vals * scale, 10))


@dataclass(frozen=True)
class Grid:
    Oq: tuple
    alpha_m: tuple
    F0: tuple
    vowels: tuple
    gci_errors: tuple

    def __len__(self):
        return len(self.Oq) * len(self.alpha_m) * len(self.F0) * len(self.vowels) * len(self.gci_errors)

    def sources(self):
        """(LFParams, vowel) pairs in grid order; each is shared by every gci_error."""
        for oq, am, f0, v in itertools.product(self.Oq, self.alpha_m, self.F0, self.vowels):
            yield LFParams(oq, am, f0), v

    def conditions(self, sample_rate=DEFAULT_SAMPLE_RATE, Qa=DEFAULT_QA):
        for lf, v in self.sources():
            lf = LFParams(lf.Oq, lf.alpha_m, lf.F0, Qa)
            for e in self.gci_errors:
                yield TestCondition(lf, v, e, sample_rate)


FULL_GRID = Grid(
    Oq=parse_range("0.4:0.05:0.9"),
    alpha_m=parse_range("0.6:0.05:0.9"),
    F0=parse_range("60:20:180"),
    vowels=VOWELS,
    gci_errors=parse_range("-50:5:50", 0.01),
)

DESK_GRID = Grid(
    Oq=(0.4, 0.65, 0.9),
    alpha_m=(0.6, 0.75, 0.9),
    F0=(60.0, 120.0, 180.0),
    vowels=("a", "i"),
    gci_errors=parse_range("-50:10:50", 0.01),
)


def make_grid(name="desk", Oq=None, alpha_m=None, F0=None, vowels=None, gci_errors=None) -> Grid:
    """Named grid with optional per-axis overrides in ``start:step:stop`` syntax.

    ``gci_errors`` is given in percent of T0, as in the test-condition table.
    """
    grids = {"desk": DESK_GRID, "full": FULL_GRID}
    if name not in grids:
        raise InvalidArgument(f"unknown grid {name!r}; expected 'desk' or 'full'")
    g = grids[name]
    return Grid(
        Oq=parse_range(Oq) if Oq else g.Oq,
        alpha_m=parse_range(alpha_m) if alpha_m else g.alpha_m,
        F0=parse_range(F0) if F0 else g.F0,
        vowels=tuple(v.strip() for v in vowels.split(",")) if vowels else g.vowels,
        gci_errors=parse_range(gci_errors, 0.01) if gci_errors else g.gci_errors,
    )
