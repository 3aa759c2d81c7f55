"""Choice of the analysis circle radius R for the chirp Z-transform."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidArgument


class Method(str, Enum):
    UNIT = "unit"
    IDEAL = "ideal"
    AUTO = "auto"


@dataclass(frozen=True)
class ChirpContour:
    radius: float
    method: Method
    bounds: tuple[float, float]
    gap_width: float | None = None

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidArgument(f"radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class ModuliProfile:
    sorted_moduli: np.ndarray
    in_band: slice

    @classmethod
    def from_roots(cls, roots, bounds):
        m = np.sort(np.abs(np.asarray(roots)))
        lo = np.searchsorted(m, bounds[0], side="left")
        hi = np.searchsorted(m, bounds[1], side="right")
        return cls(m, slice(int(lo), int(hi)))

    @property
    def in_band_moduli(self):
        return self.sorted_moduli[self.in_band]


def selection_bounds(L) -> tuple[float, float]:
    """exp(-+50 pi / (17 L)): the extreme radii a two-period window can require."""
    if L < 4:
        raise InvalidArgument(f"window length must be >= 4, got {L}")
    e = 50.0 * np.pi / (17.0 * L)
    return float(np.exp(-e)), float(np.exp(e))


def ideal_exponent_tan(t_star, L):
    """log R written exactly as the tangent-form closed expression.

    Singular at t* = L/2; kept as an independent cross-check of ``ideal_radius``.
    """
    u = np.tan(np.pi * np.asarray(t_star, dtype=float) / L)
    return 2.0 * np.pi / L * (41.0 * u**2 + 9.0) / (25.0 * u**3 + 9.0 * u)


def ideal_exponent(t_star, L):
    """log R moving the Blackman maximum to t*, via the cotangent form.

    With c = cot(pi t*/L) the ratio becomes (9c^3 + 41c)/(9c^2 + 25), which is
    finite everywhere on (0, L) and zero at the centre.
    """
    theta = np.pi * np.asarray(t_star, dtype=float) / L
    c = np.cos(theta) / np.sin(theta)
    return 2.0 * np.pi / L * (9.0 * c**3 + 41.0 * c) / (9.0 * c**2 + 25.0)


def ideal_radius(t_star, L) -> ChirpContour:
    """Radius for a GCI known to sit ``t_star`` samples after the window start."""
    if not 0 < t_star < L:
        raise InvalidArgument(f"t* must lie in (0, {L}), got {t_star}")
    if 2 * t_star == L:
        radius = 1.0
    else:
        radius = float(np.exp(ideal_exponent(t_star, L)))
    return ChirpContour(radius, Method.IDEAL, selection_bounds(L))


def clamp_gci_position(t_star, L):
    """Restrict t* to [L/4, 3L/4], where a two-period window always has a GCI."""
    return min(max(float(t_star), L / 4.0), 3.0 * L / 4.0)


def unit_radius(L) -> ChirpContour:
    return ChirpContour(1.0, Method.UNIT, selection_bounds(L))


def auto_radius(rootset, L) -> ChirpContour:
    """Midpoint of the widest gap in the sorted root moduli inside the bounds.

    The bounds themselves take part as gap edges, so a band without roots
    yields its own midpoint. Equal-width gaps are resolved towards R = 1.
    """
    roots = getattr(rootset, "roots", rootset)
    bounds = selection_bounds(L)
    profile = ModuliProfile.from_roots(roots, bounds)
    edges = np.concatenate([[bounds[0]], profile.in_band_moduli, [bounds[1]]])
    widths = np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    best = np.flatnonzero(widths == widths.max())
    k = best[np.argmin(np.abs(mids[best] - 1.0))]
    return ChirpContour(float(mids[k]), Method.AUTO, bounds, float(widths[k]))
