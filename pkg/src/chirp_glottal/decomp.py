"""Causal / anticausal decomposition of a frame on a chirp circle |z| = R."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, NumericalFailure
from .polyroots import RootSet, find_roots, root_product
from .radius import (
    ChirpContour,
    Method,
    auto_radius,
    clamp_gci_position,
    ideal_radius,
    unit_radius,
)

DEFAULT_K = 4096
BOUNDARY_TOL = 1e-9
IMAG_TOL = 1e-8


class DecompositionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Decomposition:
    anticausal_spectrum: np.ndarray
    causal_spectrum: np.ndarray
    anticausal_wave: np.ndarray
    causal_wave: np.ndarray
    radius: float
    n_anticausal: int
    n_causal: int
    K: int
    contour: ChirpContour
    rootset: RootSet
    warnings: tuple[str, ...] = field(default=())

    @property
    def residual_max(self):
        return self.rootset.residual_max

    @property
    def gap_width(self):
        return self.contour.gap_width

    @property
    def anticausal_mask(self):
        return split_mask(self.rootset.roots, self.radius)[0]


def split_mask(roots, radius):
    """Boolean masks (anticausal, boundary) for roots relative to the circle."""
    m = np.abs(np.asarray(roots))
    boundary = np.abs(m - radius) < BOUNDARY_TOL
    return (m > radius) & ~boundary, boundary


def split_roots(rootset, contour):
    """Roots outside the circle (anticausal) and inside it (causal).

    Roots within BOUNDARY_TOL of the circle go to the causal side with a
    DecompositionWarning.
    """
    roots = np.asarray(getattr(rootset, "roots", rootset))
    radius = getattr(contour, "radius", contour)
    outside, boundary = split_mask(roots, radius)
    if boundary.any():
        warnings.warn(
            f"{int(boundary.sum())} root(s) lie on the circle |z| = {radius:.12g}; assigned causal",
            DecompositionWarning,
            stacklevel=2,
        )
    return roots[outside], roots[~outside]


def circle_points(radius, K):
    return radius * np.exp(2j * np.pi * np.arange(K) / K)


def chirp_ztransform(frame, contour, K=DEFAULT_K):
    """X(R e^{j 2 pi k/K}): the K-point DFT of x(n) R^-n."""
    x = np.asarray(getattr(frame, "samples", frame), dtype=float)
    radius = float(getattr(contour, "radius", contour))
    if K < len(x):
        raise InvalidArgument(f"K={K} is shorter than the frame ({len(x)})")
    with np.errstate(over="raise", under="ignore"):
        try:
            mod = np.power(radius, -np.arange(len(x), dtype=float))
        except FloatingPointError as exc:
            raise NumericalFailure(f"radius {radius} overflows over {len(x)} samples") from exc
    if not np.all(np.isfinite(mod)) or (len(x) > 1 and mod[-1] == 0.0):
        raise NumericalFailure(f"radius {radius} is out of numerical range for {len(x)} samples")
    return np.fft.fft(x * mod, K)


def component_spectrum(roots, contour, K=DEFAULT_K, gain=None, delay_power=0):
    """prod(z - Z_m) on the circle, optionally times ``gain * z^-delay_power``.

    The anticausal side uses the plain product; the causal side passes the
    frame gain and the total power ``delay + degree``.
    """
    radius = float(getattr(contour, "radius", contour))
    z = circle_points(radius, K)
    log_val = root_product(roots, z)
    if delay_power:
        omega = 2.0 * np.pi * np.arange(K) / K
        log_val -= delay_power * (np.log(radius) + 1j * omega)
    spec = np.exp(log_val)
    if gain is not None:
        spec = gain * spec
    return spec


def reconstruct_wave(spectrum, side, n_anticausal=0):
    """Inverse DFT of a component spectrum.

    The anticausal sequence lives at negative times and wraps to the end of
    the buffer; rolling by ``n_anticausal`` puts it first with time running
    forwards, so the GCI lands on index ``n_anticausal``.
    """
    wave = np.fft.ifft(spectrum)
    peak = np.max(np.abs(wave))
    if peak > 0 and np.max(np.abs(wave.imag)) > IMAG_TOL * peak:
        warnings.warn(f"{side} wave has a non-negligible imaginary part", DecompositionWarning,
                      stacklevel=2)
    wave = wave.real
    if side == "anticausal":
        wave = np.roll(wave, n_anticausal)
    elif side != "causal":
        raise InvalidArgument(f"side must be 'anticausal' or 'causal', got {side!r}")
    return wave


def completeness_error(frame, decomposition, floor=1e-12):
    """Largest pointwise relative gap between the component product and the frame's CZT.

    Bins whose |X| is below ``floor`` times the peak are skipped.
    """
    X = chirp_ztransform(frame, decomposition.contour, decomposition.K)
    prod = decomposition.anticausal_spectrum * decomposition.causal_spectrum
    mag = np.abs(X)
    keep = mag > floor * mag.max()
    return float(np.max(np.abs(prod - X)[keep] / mag[keep]))


def resolve_contour(strategy, rootset, L, t_star=None):
    strategy = Method(strategy)
    if strategy is Method.UNIT:
        return unit_radius(L)
    if strategy is Method.AUTO:
        return auto_radius(rootset, L)
    if t_star is None:
        raise InvalidArgument("the ideal strategy needs the true GCI position t*")
    return ideal_radius(clamp_gci_position(t_star, L), L)


def decompose(frame, strategy="auto", t_star=None, K=DEFAULT_K, rootset=None) -> Decomposition:
    """Root the frame, pick R by ``strategy`` and split it into its two components.

    ``t_star`` (samples from the window start) is required for ``ideal`` and
    falls back to ``frame.nominal_gci_offset``. A precomputed ``rootset`` may be
    passed to share the rooting cost between strategies.
    """
    x = np.asarray(frame.samples)
    L = len(x)
    if K < L:
        raise InvalidArgument(f"K={K} is shorter than the frame ({L})")
    if t_star is None:
        t_star = frame.nominal_gci_offset
    if rootset is None:
        rootset = find_roots(frame)
    contour = resolve_contour(strategy, rootset, L, t_star)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DecompositionWarning)
        anti, causal = split_roots(rootset, contour)
        anti_spec = component_spectrum(anti, contour, K)
        causal_spec = component_spectrum(
            causal, contour, K, gain=rootset.gain, delay_power=rootset.delay + rootset.degree
        )
        anti_wave = reconstruct_wave(anti_spec, "anticausal", len(anti))
        causal_wave = reconstruct_wave(causal_spec, "causal")
    notes = tuple(str(w.message) for w in caught if issubclass(w.category, DecompositionWarning))
    return Decomposition(
        anticausal_spectrum=anti_spec,
        causal_spectrum=causal_spec,
        anticausal_wave=anti_wave,
        causal_wave=causal_wave,
        radius=contour.radius,
        n_anticausal=len(anti),
        n_causal=len(causal),
        K=K,
        contour=contour,
        rootset=rootset,
        warnings=notes,
    )
