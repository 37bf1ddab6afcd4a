"""Special functions and numerical kernels used throughout the package.

Contents
--------
q_function          Gaussian tail probability.
log_bessel_i0       ln I0(x), overflow-free far into the asymptotic regime.
marcum_q1           First-order Marcum Q with a rigorously truncated series.
ncx2_pdf, ncx2_cdf  Noncentral chi-square with two degrees of freedom.
log_sum_exp         Stable ln(sum(exp(v))).
integrate           Adaptive Gauss-Kronrod quadrature, finite or semi-infinite.
psk_constellation   Unit-power PSK points with binary-reflected Gray labels.

Everything here is pure and deterministic; all routines are safe to call
from concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError

__all__ = [
    "q_function",
    "log_bessel_i0",
    "marcum_q1",
    "NoncentralChiSq2",
    "ncx2_pdf",
    "ncx2_cdf",
    "log_sum_exp",
    "integrate",
    "Constellation",
    "psk_constellation",
]

_SQRT2 = math.sqrt(2.0)


def q_function(x: float) -> float:
    """Upper tail probability of the standard normal distribution.

    Parameters
    ----------
    x : float
        Threshold; must be finite.

    Returns
    -------
    float
        P(Z > x) for Z ~ N(0, 1).  Monotone nonincreasing in ``x``; values
        below ~1e-308 underflow cleanly to 0.0.
    """
    if not math.isfinite(x):
        raise ValueError(f"q_function requires finite input, got {x!r}")
    return 0.5 * math.erfc(x / _SQRT2)


def _i0_series_log(x: np.ndarray) -> np.ndarray:
    # Power series sum_k (x^2/4)^k / (k!)^2; safe from overflow for x <= 50
    # because the largest term stays far below the float ceiling there.
    total = np.ones_like(x)
    term = np.ones_like(x)
    quarter = 0.25 * x * x
    for k in range(1, 200):
        term = term * quarter / (k * k)
        total += term
        if np.all(term <= 1e-18 * total):
            break
    return np.log(total)


def _i0_asymptotic_log(x: np.ndarray) -> np.ndarray:
    # I0(x) ~ e^x / sqrt(2 pi x) * (1 + 1/(8x) + 9/(128x^2) + ...); truncating
    # after the x^-4 term keeps the absolute log error below 1e-12 for x >= 50.
    inv = 1.0 / x
    corr = 1.0 + inv * (
        0.125 + inv * (9.0 / 128.0 + inv * (225.0 / 3072.0 + inv * (11025.0 / 98304.0)))
    )
    return x - 0.5 * np.log(2.0 * np.pi * x) + np.log(corr)


def log_bessel_i0(x):
    """Natural log of the modified Bessel function I0.

    Accepts scalars or arrays of nonnegative values.  A power series covers
    x <= 30 and an asymptotic expansion the rest, so the result stays finite
    up to x ~ 1e6 and beyond without overflow.
    """
    scalar = np.ndim(x) == 0
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.size and (np.any(arr < 0.0) or not np.all(np.isfinite(arr))):
        raise ValueError("log_bessel_i0 requires finite x >= 0")
    out = np.empty_like(arr)
    small = arr <= 50.0
    if np.any(small):
        out[small] = _i0_series_log(arr[small])
    if np.any(~small):
        out[~small] = _i0_asymptotic_log(arr[~small])
    return float(out[0]) if scalar else out.reshape(np.shape(x))


def _poisson_cdf_window(y: np.ndarray, kmax: int) -> np.ndarray:
    """P(Poisson(y) <= kmax), vectorized over y, with windowed summation.

    The pmf is summed only over a window around the Poisson bulk; the mass
    outside the window is below ~1e-30, far under every tolerance used here.
    """
    out = np.empty_like(y)
    margin = 13.0 * math.sqrt(max(kmax, 1)) + 45.0
    lo = y <= kmax - margin
    hi = y >= kmax + margin
    mid = ~(lo | hi)
    out[lo] = 1.0
    out[hi] = 0.0
    if np.any(mid):
        ym = y[mid]
        j0 = max(0, int(math.floor(kmax - 2.0 * margin)))
        if j0 > 0:
            logq = -ym + j0 * np.log(ym) - math.lgamma(j0 + 1)
            q = np.exp(logq)
        else:
            q = np.exp(-ym)
        acc = q.copy()
        for j in range(j0 + 1, kmax + 1):
            q = q * ym / j
            acc += q
        out[mid] = np.minimum(acc, 1.0)
    return out


def marcum_q1(a: float, b):
    """First-order Marcum Q function Q1(a, b).

    Evaluated as a Poisson mixture of Erlang tail probabilities with a
    two-sided window around the mixture bulk.  The discarded mixture mass
    bounds the truncation error and is kept below ~1e-30, so results are
    trustworthy to well past 1e-12 absolute.

    ``a`` is a scalar; ``b`` may be a scalar or an array.  Both must be
    nonnegative.  Nonincreasing in ``b``, nondecreasing in ``a``; the range
    is [0, 1].
    """
    if not (np.isscalar(a) or np.ndim(a) == 0) or not math.isfinite(float(a)) or float(a) < 0.0:
        raise ValueError("marcum_q1 requires scalar finite a >= 0")
    a = float(a)
    scalar = np.ndim(b) == 0
    barr = np.atleast_1d(np.asarray(b, dtype=float))
    if barr.size and (np.any(barr < 0.0) or not np.all(np.isfinite(barr))):
        raise ValueError("marcum_q1 requires finite b >= 0")
    y = 0.5 * barr * barr
    h = 0.5 * a * a
    if h == 0.0:
        out = np.exp(-y)
        return float(out[0]) if scalar else out.reshape(np.shape(b))

    width = 13.0 * math.sqrt(h) + 45.0
    n_lo = max(0, int(math.floor(h - width)))
    n_hi = int(math.ceil(h + width))
    ns = np.arange(n_lo, n_hi + 1)
    # Poisson(h) weights over the window, built from a log anchor at n_lo.
    log_w0 = -h + (n_lo * math.log(h) if n_lo > 0 else 0.0) - math.lgamma(n_lo + 1)
    log_w = log_w0 + np.concatenate(([0.0], np.cumsum(math.log(h) - np.log(ns[1:]))))
    weights = np.exp(log_w)

    # Partner factor P(Poisson(y) <= n), advanced one pmf term per step.
    positive = y > 0.0
    if n_lo > 0:
        head = _poisson_cdf_window(y, n_lo - 1)
        logq = np.where(positive, -y + n_lo * np.log(np.where(positive, y, 1.0)), 0.0)
        logq = logq - math.lgamma(n_lo + 1)
        q = np.where(positive, np.exp(logq), 0.0)
    else:
        head = np.zeros_like(y)
        q = np.where(positive, np.exp(-y), 1.0)
    partner = head + q
    total = weights[0] * partner
    for idx in range(1, ns.size):
        q = q * y / ns[idx]
        partner = partner + q
        total += weights[idx] * partner
    out = np.clip(total, 0.0, 1.0)
    return float(out[0]) if scalar else out.reshape(np.shape(b))


@dataclass(frozen=True)
class NoncentralChiSq2:
    """Noncentral chi-square law with two degrees of freedom.

    The variate is |z|^2 for a complex Gaussian z whose real and imaginary
    parts have unit variance; ``noncentrality`` is the squared mean divided
    by that per-component variance.
    """

    noncentrality: float

    def __post_init__(self):
        lam = self.noncentrality
        if not (np.ndim(lam) == 0 and math.isfinite(float(lam)) and float(lam) >= 0.0):
            raise ValueError("noncentrality must be a finite scalar >= 0")

    def pdf(self, g):
        return ncx2_pdf(g, self)

    def cdf(self, g):
        return ncx2_cdf(g, self)


def _noncentrality_of(dist) -> float:
    return float(getattr(dist, "noncentrality", dist))


def ncx2_pdf(g, dist):
    """Density of the two-degree-of-freedom noncentral chi-square law.

    0.5 * exp(-(g + lam)/2) * I0(sqrt(lam * g)), evaluated in log space so
    large arguments neither overflow nor lose the exponential cancellation.
    ``g`` may be a scalar or array; values must be >= 0.
    """
    lam = _noncentrality_of(dist)
    if lam < 0.0 or not math.isfinite(lam):
        raise ValueError("noncentrality must be finite and >= 0")
    scalar = np.ndim(g) == 0
    garr = np.atleast_1d(np.asarray(g, dtype=float))
    if garr.size and (np.any(garr < 0.0) or not np.all(np.isfinite(garr))):
        raise ValueError("ncx2_pdf requires finite g >= 0")
    log_pdf = -math.log(2.0) - 0.5 * (garr + lam) + log_bessel_i0(np.sqrt(lam * garr))
    out = np.exp(log_pdf)
    return float(out[0]) if scalar else out.reshape(np.shape(g))


def ncx2_cdf(g, dist):
    """CDF of the two-degree-of-freedom noncentral chi-square law.

    Computed as 1 - Q1(sqrt(lam), sqrt(g)); nondecreasing with cdf(0) = 0.
    """
    lam = _noncentrality_of(dist)
    if lam < 0.0 or not math.isfinite(lam):
        raise ValueError("noncentrality must be finite and >= 0")
    scalar = np.ndim(g) == 0
    garr = np.atleast_1d(np.asarray(g, dtype=float))
    if garr.size and (np.any(garr < 0.0) or not np.all(np.isfinite(garr))):
        raise ValueError("ncx2_cdf requires finite g >= 0")
    out = 1.0 - np.atleast_1d(marcum_q1(math.sqrt(lam), np.sqrt(garr)))
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out.reshape(np.shape(g))


def log_sum_exp(values) -> float:
    """ln(sum(exp(v))) computed without overflow or underflow.

    ``values`` must be nonempty; entries may be finite or -inf (an all--inf
    input returns -inf).  Exact for a single element.
    """
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("log_sum_exp requires a nonempty sequence")
    if np.any(np.isnan(arr)) or np.any(arr == np.inf):
        raise ValueError("log_sum_exp entries must be finite or -inf")
    m = float(np.max(arr))
    if m == -np.inf:
        return -np.inf
    return m + math.log(float(np.sum(np.exp(arr - m))))


# 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
_GK_NODES = np.array(
    [
        -0.991455371120813,
        -0.949107912342759,
        -0.864864423359769,
        -0.741531185599394,
        -0.586087235467691,
        -0.405845151377397,
        -0.207784955007898,
        0.0,
        0.207784955007898,
        0.405845151377397,
        0.586087235467691,
        0.741531185599394,
        0.864864423359769,
        0.949107912342759,
        0.991455371120813,
    ]
)
_GK_WEIGHTS = np.array(
    [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
        0.204432940075298,
        0.190350578064785,
        0.169004726639267,
        0.140653259715525,
        0.104790010322250,
        0.063092092629979,
        0.022935322010529,
    ]
)
_G7_WEIGHTS = np.array(
    [
        0.129484966168870,
        0.279705391489277,
        0.381830050505119,
        0.417959183673469,
        0.381830050505119,
        0.279705391489277,
        0.129484966168870,
    ]
)


def _gk15(f, lo: np.ndarray, hi: np.ndarray):
    """Apply the 15-point Kronrod rule to a batch of intervals."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = mid[:, None] + half[:, None] * _GK_NODES[None, :]
    vals = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)
    k15 = half * (vals @ _GK_WEIGHTS)
    g7 = half * (vals[:, 1::2] @ _G7_WEIGHTS)
    err = np.abs(k15 - g7)
    return k15, err


def integrate(f, lower: float, upper: float, tol: float = 1e-9, max_intervals: int = 4000) -> float:
    """Adaptive quadrature of ``f`` with an absolute-error target.

    ``f`` must accept an ndarray of evaluation points and return values
    elementwise.  A semi-infinite upper limit is mapped through
    g = lower + t/(1-t) onto t in [0, 1); Kronrod nodes are interior, so the
    transformed integrand is never evaluated at the endpoint, and refinement
    toward t=1 truncates the tail once its contribution drops below the
    error budget.

    Raises
    ------
    NumericError
        If the interval budget is exhausted before the error bound reaches
        ``tol``; the exception carries the best estimate and its bound.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if not math.isfinite(lower):
        raise ValueError("lower limit must be finite")
    if math.isinf(upper):
        a = lower

        def transformed(t):
            t = np.asarray(t, dtype=float)
            u = 1.0 - t
            g = a + t / u
            return np.asarray(f(g), dtype=float) / (u * u)

        seeds = np.array([0.0, 0.5, 0.9, 0.99, 0.999, 0.9999, 1.0])
        return _adaptive(transformed, seeds, tol, max_intervals)
    if upper < lower:
        raise ValueError("upper limit must be >= lower limit")
    if upper == lower:
        return 0.0
    seeds = np.array([lower, upper], dtype=float)
    return _adaptive(f, seeds, tol, max_intervals)


def _adaptive(f, seeds: np.ndarray, tol: float, max_intervals: int) -> float:
    lo = seeds[:-1].copy()
    hi = seeds[1:].copy()
    vals, errs = _gk15(f, lo, hi)
    for _ in range(10 * max_intervals):
        total = float(np.sum(vals))
        bound = float(np.sum(errs))
        if bound <= tol:
            return total
        if lo.size >= max_intervals:
            raise NumericError("quadrature did not converge", total, bound)
        # Split the worst intervals; batching keeps the integrand calls large.
        n_split = min(max(1, lo.size // 4), 32, max_intervals - lo.size)
        worst = np.argsort(errs)[-n_split:]
        mids = 0.5 * (lo[worst] + hi[worst])
        new_lo = np.concatenate([lo[worst], mids])
        new_hi = np.concatenate([mids, hi[worst]])
        new_vals, new_errs = _gk15(f, new_lo, new_hi)
        keep = np.ones(lo.size, dtype=bool)
        keep[worst] = False
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])
    raise NumericError("quadrature refinement stalled", float(np.sum(vals)), float(np.sum(errs)))


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Constellation:
    """A unit-average-power symbol set with per-point bit labels."""

    order: int
    points: tuple
    bit_labels: tuple

    def __post_init__(self):
        if not _is_power_of_two(self.order):
            raise ValueError("constellation order must be a power of two")
        if len(self.points) != self.order or len(self.bit_labels) != self.order:
            raise ValueError("points and bit_labels must both have `order` entries")
        mean_power = float(np.mean(np.abs(np.asarray(self.points)) ** 2))
        if abs(mean_power - 1.0) > 1e-12:
            raise ValueError(f"mean symbol power must be 1, got {mean_power!r}")
        nbits = self.bits_per_symbol
        if any(len(lbl) != nbits or set(lbl) - {"0", "1"} for lbl in self.bit_labels):
            raise ValueError("bit labels must be binary strings of length log2(order)")

    @property
    def bits_per_symbol(self) -> int:
        return self.order.bit_length() - 1


def psk_constellation(order: int) -> Constellation:
    """Equally spaced unit-circle points with binary-reflected Gray labels.

    Point k sits at angle 2*pi*k/order and carries the Gray code of k, so
    angularly adjacent points differ in exactly one bit.  ``order`` must be
    a power of two and at least 2.
    """
    if not isinstance(order, (int, np.integer)) or order < 2 or not _is_power_of_two(int(order)):
        raise ValueError(f"PSK order must be a power of two >= 2, got {order!r}")
    order = int(order)
    nbits = order.bit_length() - 1
    angles = 2.0 * np.pi * np.arange(order) / order
    re = np.cos(angles)
    im = np.sin(angles)
    # Snap the cardinal points so {+1, -1, +i, -i} come out exact.
    re[np.abs(re) < 1e-15] = 0.0
    im[np.abs(im) < 1e-15] = 0.0
    points = tuple(complex(a, b) for a, b in zip(re, im))
    labels = tuple(format(k ^ (k >> 1), "b").zfill(nbits) for k in range(order))
    return Constellation(order=order, points=points, bit_labels=labels)
