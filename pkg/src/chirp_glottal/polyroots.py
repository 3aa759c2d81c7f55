"""Zeros of the Z-transform of a finite frame.

A frame ``x(0..N-1)`` has Z-transform ``X(z) = sum x(n) z^-n``, which factors as
``x(0) z^-(N-1) prod (z - Z_m)``. The roots ``Z_m`` are those of the ordinary
polynomial whose coefficients, highest power first, are the samples themselves.

Roots come from the eigenvalues of a balanced companion matrix and are then
polished with Aberth-Ehrlich iterations against the original coefficients.
Above ``COMPENSATED_DEGREE`` the polishing evaluates the polynomial in
double-double arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvals, matrix_balance

from .errors import DegenerateInput, NumericalFailure

COMPENSATED_DEGREE = 256
RESIDUAL_TOL = 1e-6
STEP_TOL = 1e-12
MAX_ITER = 50
VERIFY_POINTS = 1024

_EPS = np.finfo(float).eps
_SPLITTER = 134217729.0  # 2**27 + 1


@dataclass(frozen=True)
class RootSet:
    """Roots of a frame's Z-transform.

    ``X(z) = gain * z^-(delay + degree) * prod(z - roots)`` where ``delay`` counts
    leading zero samples dropped before rooting.
    """

    roots: np.ndarray
    gain: float
    degree: int
    residual_max: float = 0.0
    delay: int = 0

    def __post_init__(self):
        roots = np.asarray(self.roots, dtype=complex).reshape(-1)
        if len(roots) != self.degree:
            raise ValueError(f"expected {self.degree} roots, got {len(roots)}")
        roots.setflags(write=False)
        object.__setattr__(self, "roots", roots)

    @property
    def moduli(self):
        return np.abs(self.roots)


# --- polynomial evaluation -------------------------------------------------


def _horner(c, z):
    """p(z) and p'(z) for coefficients ``c`` (highest power first)."""
    p = np.full(z.shape, c[0], dtype=complex)
    dp = np.zeros(z.shape, dtype=complex)
    for a in c[1:]:
        dp = dp * z + p
        p = p * z + a
    return p, dp


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _dd_mul_d(hi, lo, d, d_hi, d_lo):
    # (hi + lo) * d with d pre-split into d_hi + d_lo
    p = hi * d
    h_hi, h_lo = _split(hi)
    err = ((h_hi * d_hi - p) + h_hi * d_lo + h_lo * d_hi) + h_lo * d_lo
    lo = err + lo * d
    s = p + lo
    return s, lo - (s - p)


def _dd_add(a_hi, a_lo, b_hi, b_lo):
    s, e = _two_sum(a_hi, b_hi)
    e = e + (a_lo + b_lo)
    h = s + e
    return h, e - (h - s)


def _horner_dd(c, z):
    """p(z) with double-double accumulation, rounded back to complex128."""
    x, y = z.real.copy(), z.imag.copy()
    x_hi, x_lo = _split(x)
    y_hi, y_lo = _split(y)
    re_hi = np.full(z.shape, float(c[0]))
    re_lo = np.zeros(z.shape)
    im_hi = np.zeros(z.shape)
    im_lo = np.zeros(z.shape)
    for a in c[1:]:
        a_hi, a_lo = _dd_mul_d(re_hi, re_lo, x, x_hi, x_lo)
        b_hi, b_lo = _dd_mul_d(im_hi, im_lo, y, y_hi, y_lo)
        c_hi, c_lo = _dd_mul_d(re_hi, re_lo, y, y_hi, y_lo)
        d_hi, d_lo = _dd_mul_d(im_hi, im_lo, x, x_hi, x_lo)
        n_hi, n_lo = _dd_add(a_hi, a_lo, -b_hi, -b_lo)
        re_hi, re_lo = _dd_add(n_hi, n_lo, float(a), 0.0)
        im_hi, im_lo = _dd_add(c_hi, c_lo, d_hi, d_lo)
    return (re_hi + re_lo) + 1j * (im_hi + im_lo)


def _newton_ratio(c, z, compensated):
    """p(z)/p'(z) and a bound on the rounding noise in p, relative to |p|'s scale.

    Points outside the unit disc are handled through the reversed polynomial
    in 1/z so that powers never exceed one in modulus.
    """
    n = len(c) - 1
    ratio = np.empty(z.shape, dtype=complex)
    noise = np.empty(z.shape, dtype=bool)
    inside = np.abs(z) <= 1.0
    absc = np.abs(c)
    for mask, coeffs in ((inside, c), (~inside, c[::-1])):
        if not mask.any():
            continue
        w = z[mask] if coeffs is c else 1.0 / z[mask]
        q, dq = _horner(coeffs, w)
        if compensated:
            q = _horner_dd(coeffs, w)
            bound = 8.0 * n * _EPS * _EPS * np.polyval(absc if coeffs is c else absc[::-1], np.abs(w))
        else:
            bound = 4.0 * n * _EPS * np.polyval(absc if coeffs is c else absc[::-1], np.abs(w))
        noise[mask] = np.abs(q) <= bound
        if coeffs is c:
            ratio[mask] = q / dq
        else:
            ratio[mask] = z[mask] * q / (n * q - w * dq)
    return ratio, noise


# --- root finding ----------------------------------------------------------


def companion_roots(c):
    """Eigenvalues of the balanced companion matrix of ``c`` (highest power first)."""
    c = np.asarray(c, dtype=float)
    n = len(c) - 1
    if n < 1:
        return np.empty(0, dtype=complex)
    if n == 1:
        return np.array([-c[1] / c[0]], dtype=complex)
    A = np.zeros((n, n))
    A[0, :] = -c[1:] / c[0]
    A[np.arange(1, n), np.arange(n - 1)] = 1.0
    A, _ = matrix_balance(A, permute=False)
    return eigvals(A, overwrite_a=True, check_finite=False)


def refine_roots(coefficients, initial_roots, max_iter=MAX_ITER, compensated=None):
    """Aberth-Ehrlich polishing of all roots simultaneously.

    A root stops moving once its correction falls below ``STEP_TOL * |root|``
    or once |p| at the root is within rounding noise of the evaluation.
    Raises NumericalFailure if some root has not settled after ``max_iter``
    sweeps or the iteration produces non-finite values.
    """
    c = np.asarray(coefficients, dtype=float)
    z = np.array(initial_roots, dtype=complex)
    n = len(z)
    if n != len(c) - 1:
        raise ValueError("need exactly one initial root per degree")
    if n == 0:
        return z
    if compensated is None:
        compensated = n > COMPENSATED_DEGREE
    # double precision first; double-double only for the final polish
    stages = (False, True) if compensated else (False,)
    for stage in stages:
        active = np.ones(n, dtype=bool)
        for _ in range(max_iter):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            zi = z[idx]
            ratio, noise = _newton_ratio(c, zi, stage)
            diff = zi[:, None] - z[None, :]
            diff[np.arange(idx.size), idx] = np.inf
            s = np.sum(1.0 / diff, axis=1)
            step = ratio / (1.0 - ratio * s)
            step[noise] = 0.0
            if not np.all(np.isfinite(step)):
                raise NumericalFailure("Aberth iteration produced non-finite values")
            z[idx] = zi - step
            done = noise | (np.abs(step) <= STEP_TOL * np.abs(zi))
            active[idx[done]] = False
        else:
            if active.any() and stage == stages[-1]:
                raise NumericalFailure(
                    f"{int(active.sum())} roots did not converge in {max_iter} iterations"
                )
    return z


def find_roots(frame) -> RootSet:
    """All zeros of the frame's Z-transform, verified by residual."""
    x = np.asarray(getattr(frame, "samples", frame), dtype=float)
    if x.size < 2:
        raise DegenerateInput("need at least two samples")
    nz = np.flatnonzero(x)
    if nz.size == 0:
        raise DegenerateInput("all-zero frame has no Z-transform zeros")
    first, last = nz[0], nz[-1]
    core = x[first:last + 1]
    scale = np.max(np.abs(core))
    c = core / scale
    roots = companion_roots(c)
    if len(roots):
        roots = refine_roots(c, roots)
    # trailing zeros are roots at the origin
    roots = np.concatenate([roots, np.zeros(len(x) - 1 - last, dtype=complex)])
    rs = RootSet(roots=roots, gain=float(x[first]), degree=len(roots), delay=int(first))
    residual = verify_roots(x, rs)
    if residual > RESIDUAL_TOL:
        raise NumericalFailure(f"root residual {residual:.3g} exceeds {RESIDUAL_TOL:g}", residual)
    return RootSet(rs.roots, rs.gain, rs.degree, residual, rs.delay)


# --- verification ----------------------------------------------------------


def modulated_dft(x, radius, K):
    """X(radius * e^{j 2 pi k/K}) for k < K via the DFT of x(n) radius^-n.

    Sequences longer than K are folded modulo K, which is exact on the grid.
    """
    x = np.asarray(x, dtype=float)
    n = np.arange(len(x))
    y = x * np.power(float(radius), -n)
    if len(y) > K:
        y = np.bincount(n % K, weights=y, minlength=K)
    return np.fft.fft(y, K)


def root_product(roots, z, chunk=512):
    """log of prod(z - roots) for every z, as a complex array (log-magnitude + j*phase)."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    roots = np.asarray(roots, dtype=complex)
    for i in range(0, len(roots), chunk):
        r = roots[i:i + chunk]
        d = z[:, None] - r[None, :]
        out += np.sum(np.log(np.abs(d)), axis=1) + 1j * np.sum(np.angle(d), axis=1)
    return out


def rootset_transform(rootset: RootSet, z):
    """gain * z^-(delay+degree) * prod(z - Z_m), evaluated in the log domain."""
    z = np.asarray(z, dtype=complex)
    log_val = root_product(rootset.roots, z)
    log_val -= (rootset.delay + rootset.degree) * np.log(z)
    return rootset.gain * np.exp(log_val)


def verify_roots(frame, rootset: RootSet, radii=None, points=VERIFY_POINTS) -> float:
    """Largest relative mismatch between the frame's Z-transform and the root product.

    Evaluated on ``points`` equispaced angles of each circle in ``radii``
    (defaults to the radius-selection bounds for this frame length). Each
    circle's error is scaled by the peak |X| on that circle.
    """
    x = np.asarray(getattr(frame, "samples", frame), dtype=float)
    if radii is None:
        from .radius import selection_bounds

        radii = selection_bounds(max(len(x), 4))
    worst = 0.0
    omega = 2.0 * np.pi * np.arange(points) / points
    for r in radii:
        lhs = modulated_dft(x, r, points)
        rhs = rootset_transform(rootset, r * np.exp(1j * omega))
        scale = np.max(np.abs(lhs))
        if scale == 0.0:
            return np.inf
        worst = max(worst, float(np.max(np.abs(lhs - rhs)) / scale))
    return worst
