"""Liljencrants-Fant glottal flow derivative pulses.

Times are in samples. One period runs over ``n = 0 .. T0-1``:

* open phase, ``n < te``: ``E0 exp(alpha n) sin(pi n / tp)``
* return phase, ``n >= te``: ``-Ee/(eps Ta) (exp(-eps (n - te)) - exp(-eps (T0 - te)))``

with ``te = round(Oq T0)`` (the GCI sits on a sample), ``tp = alpha_m te`` and
``Ta = Qa T0``. ``eps`` solves
``eps Ta = 1 - exp(-eps (T0 - te))``; ``E0`` pins the open phase to ``-Ee`` at
``te``; ``alpha`` is chosen so that the sampled period sums to zero (no net
flow over a cycle).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, NumericalFailure

SOLVER_TOL = 1e-12
# return-phase quotient; a short return keeps the closure impulse sharp
DEFAULT_QA = 0.01
# Ta is kept below this fraction of the closed phase so eps stays positive
MAX_RETURN_FRACTION = 0.5


@dataclass(frozen=True)
class LFParams:
    Oq: float
    alpha_m: float
    F0: float
    Qa: float = DEFAULT_QA
    Ee: float = 1.0

    def __post_init__(self):
        tol = 1e-9
        if not 0.4 - tol <= self.Oq <= 0.9 + tol:
            raise InvalidArgument(f"Oq={self.Oq} outside [0.4, 0.9]")
        if not 0.6 - tol <= self.alpha_m <= 0.9 + tol:
            raise InvalidArgument(f"alpha_m={self.alpha_m} outside [0.6, 0.9]")
        if not 60 - tol <= self.F0 <= 180 + tol:
            raise InvalidArgument(f"F0={self.F0} outside [60, 180] Hz")
        if self.Qa < 0:
            raise InvalidArgument("Qa must be non-negative")
        if self.Ee <= 0:
            raise InvalidArgument("Ee must be positive")


def safeguarded_newton(f, df, lo, hi, tol=SOLVER_TOL, max_iter=200):
    """Root of ``f`` bracketed by [lo, hi], Newton steps with bisection fallback."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise NumericalFailure(f"root not bracketed in [{lo}, {hi}]")
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        fx = f(x)
        if fx == 0:
            return x
        if np.sign(fx) == np.sign(flo):
            lo, flo = x, fx
        else:
            hi = x
        d = df(x)
        step_ok = d != 0
        if step_ok:
            x_new = x - fx / d
            step_ok = lo < x_new < hi
        if not step_ok:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= tol * max(abs(x_new), 1e-300) or hi - lo <= tol * max(abs(lo), abs(hi)):
            return x_new
        x = x_new
    raise NumericalFailure("safeguarded Newton did not converge")


def return_time_constant(Ta, closed):
    """Positive ``eps`` with ``eps Ta = 1 - exp(-eps closed)``; requires Ta < closed."""
    if not 0 < Ta < closed:
        raise InvalidArgument("return phase must be shorter than the closed phase")
    if closed / Ta > 700.0:
        # exp(-eps closed) underflows; eps Ta = 1 to double precision
        return min(1.0 / Ta, np.finfo(float).max)
    f = lambda e: e * Ta - 1.0 + np.exp(-e * closed)
    df = lambda e: Ta - closed * np.exp(-e * closed)
    lo = (closed - Ta) / closed**2
    # the root sits just below 1/Ta; widen so rounding cannot lose the bracket
    hi = (1.0 + 1e-9) / Ta
    return safeguarded_newton(f, df, lo, hi)


@dataclass(frozen=True)
class LFShape:
    T0: int
    te: float
    tp: float
    Ta: float
    eps: float
    alpha: float
    E0: float


def closure_instant(lf: LFParams, T0):
    return int(round(lf.Oq * int(T0)))


def effective_return(lf: LFParams, T0):
    te = closure_instant(lf, T0)
    return min(lf.Qa * T0, MAX_RETURN_FRACTION * (T0 - te))


def return_phase(n, te, T0, Ta, eps, Ee):
    n = np.asarray(n, dtype=float)
    if Ta <= 0:
        return np.zeros_like(n)
    # eps Ta = 1 - exp(-eps (T0 - te)), written without Ta so tiny Ta stays finite
    with np.errstate(over="ignore"):  # huge eps: exp(-inf) = 0 is the intended limit
        tail = np.exp(-eps * (T0 - te))
        return -Ee / (1.0 - tail) * (np.exp(-eps * (n - te)) - tail)


def solve_shape(lf: LFParams, T0) -> LFShape:
    T0 = int(T0)
    te = closure_instant(lf, T0)
    tp = lf.alpha_m * te
    wg = np.pi / tp
    Ta = effective_return(lf, T0)
    eps = return_time_constant(Ta, T0 - te) if Ta > 0 else np.inf
    n = np.arange(T0, dtype=float)
    n_open = n[n < te]
    target = -np.sum(return_phase(n[n >= te], te, T0, Ta, eps, lf.Ee))
    s_te = np.sin(wg * te)
    basis = np.sin(wg * n_open)
    shift = n_open - te

    # open-phase sum as a function of alpha, minus the return-phase deficit
    def g(a):
        return -lf.Ee / s_te * np.sum(np.exp(a * shift) * basis) - target

    def dg(a):
        return -lf.Ee / s_te * np.sum(shift * np.exp(a * shift) * basis)

    lo, hi = -0.05, 0.05
    for _ in range(60):
        if g(lo) > 0:
            break
        lo *= 2.0
    for _ in range(60):
        if g(hi) < 0:
            break
        hi *= 2.0
    alpha = safeguarded_newton(g, dg, lo, hi)
    E0 = -lf.Ee / (np.exp(alpha * te) * s_te)
    return LFShape(T0, te, tp, Ta, eps, alpha, E0)


def lf_pulse(lf: LFParams, T0) -> np.ndarray:
    """One period (``T0`` samples) of the LF glottal flow derivative."""
    if T0 < 16:
        raise InvalidArgument("T0 must be at least 16 samples")
    s = solve_shape(lf, T0)
    n = np.arange(s.T0, dtype=float)
    out = np.empty(s.T0)
    op = n < s.te
    out[op] = s.E0 * np.exp(s.alpha * n[op]) * np.sin(np.pi * n[op] / s.tp)
    out[~op] = return_phase(n[~op], s.te, s.T0, s.Ta, s.eps, lf.Ee)
    return out


def open_phase(lf: LFParams, T0) -> np.ndarray:
    """Open-phase part of the pulse, up to and including the GCI sample."""
    pulse = lf_pulse(lf, T0)
    return pulse[: closure_instant(lf, T0) + 1]
