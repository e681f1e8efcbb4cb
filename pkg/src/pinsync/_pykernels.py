"""Pure NumPy implementations of the hot kernels.

These define the reference semantics. ``_kernels.pyx`` mirrors every function
here with the same signature, and ``tests/test_backend.py`` checks that the two
agree.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import erfcx, j0, ndtr

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
# below this the Mills-ratio series replaces the erfcx form of phi(a) + a*Phi(a)
_MILLS_CUTOFF = -100.0
_SERIES_LIMIT = 30.0


def _use_asymptotic(nu, z):
    return (z > _SERIES_LIMIT) & (z > 4.0 * nu * nu)


def _series_scaled(nu, z):
    # exp(-z) I_nu(z) from the ascending series, term ratio recurrence
    out = np.zeros_like(z)
    pos = z > 0
    zp = z[pos]
    if zp.size:
        term = np.exp(nu * (np.log(zp) - math.log(2.0)) - math.lgamma(nu + 1.0) - zp)
        total = term.copy()
        q = 0.25 * zp * zp
        m = 0
        active = np.ones(zp.shape, dtype=bool)
        while active.any():
            m += 1
            term = term * q / (m * (m + nu))
            total += term
            active = (term > 1e-17 * total) | (m < 0.5 * zp)
            if m > 100000:  # pragma: no cover
                break
        out[pos] = total
    zero = ~pos
    if zero.any():
        if nu == 0.0:
            out[zero] = 1.0
        elif nu < 0.0:
            out[zero] = np.inf
    return out


def _hankel_scaled(nu, z):
    # large-argument expansion exp(-z) I_nu(z) ~ (2 pi z)^-1/2 sum (-1)^k a_k(nu) / z^k
    mu4 = 4.0 * nu * nu
    term = np.ones_like(z)
    total = np.ones_like(z)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, 60):
        new = -term * (mu4 - (2 * k - 1) ** 2) / (8.0 * k * z)
        grow = np.abs(new) >= np.abs(term)
        active &= ~grow
        term = np.where(active, new, 0.0)
        total += term
        active &= np.abs(term) > 1e-17 * np.abs(total)
        if not active.any():
            break
    return total / np.sqrt(2.0 * math.pi * z)


def bessel_i_scaled(nu, z):
    """exp(-z) * I_nu(z) for scalar order ``nu`` and array ``z >= 0``."""
    z = np.asarray(z, dtype=float)
    flat = z.reshape(-1)
    out = np.empty_like(flat)
    asym = _use_asymptotic(nu, flat)
    if asym.any():
        out[asym] = _hankel_scaled(nu, flat[asym])
    if (~asym).any():
        out[~asym] = _series_scaled(nu, flat[~asym])
    return out.reshape(z.shape)


def _log_g_and_ratio(a):
    """log(phi(a) + a*Phi(a)) and Phi(a) / (phi(a) + a*Phi(a))."""
    logg = np.empty_like(a)
    ratio = np.empty_like(a)
    pos = a >= 0.0
    ap = a[pos]
    cdf = ndtr(ap)
    g = _INV_SQRT_2PI * np.exp(-0.5 * ap * ap) + ap * cdf
    logg[pos] = np.log(g)
    ratio[pos] = cdf / g

    mid = (~pos) & (a >= _MILLS_CUTOFF)
    am = a[mid]
    ex = 0.5 * erfcx(-am / _SQRT2)
    inner = _INV_SQRT_2PI + am * ex
    logg[mid] = -0.5 * am * am + np.log(inner)
    ratio[mid] = ex / inner

    far = a < _MILLS_CUTOFF
    if far.any():
        af = a[far]
        r2 = 1.0 / (af * af)
        inner = _INV_SQRT_2PI * r2 * (1.0 - 3.0 * r2 + 15.0 * r2 * r2 - 105.0 * r2**3)
        mills = -(1.0 / af) * (1.0 - r2 + 3.0 * r2 * r2 - 15.0 * r2**3) * _INV_SQRT_2PI
        logg[far] = -0.5 * af * af + np.log(inner)
        ratio[far] = mills / inner
    return logg, ratio


def pin_logpdf(d, gamma):
    """Log density of PIN(0, gamma) at angles ``d`` (radians)."""
    d = np.asarray(d, dtype=float)
    if gamma == 0.0:
        return np.full(d.shape, -2.0 * _LOG_SQRT_2PI)
    delta = 2.0 * math.sqrt(gamma)
    a = delta * np.cos(d)
    b = delta * np.sin(d)
    logg, _ = _log_g_and_ratio(a.reshape(-1))
    return (-0.5 * b * b - _LOG_SQRT_2PI) + logg.reshape(d.shape)


def pin_loglik_terms(d, gamma):
    """Log-likelihood and its partial derivatives for PIN(0, gamma) data ``d``.

    Returns ``(loglik, d/dgamma, d/dmu)`` summed over the sample, where the
    sample is ``d = theta - mu``. Requires ``gamma > 0``.
    """
    d = np.asarray(d, dtype=float).reshape(-1)
    root = math.sqrt(gamma)
    c = np.cos(d)
    s = np.sin(d)
    a = 2.0 * root * c
    b = 2.0 * root * s
    logg, ratio = _log_g_and_ratio(a)
    loglik = float(np.sum(-0.5 * b * b - _LOG_SQRT_2PI + logg))
    dgamma = float(np.sum(-2.0 * s * s + ratio * c / root))
    dmu = float(np.sum(b * (a + ratio)))
    return loglik, dgamma, dmu


def weighted_j0_panel_sums(R, u, wt, starts):
    """Panel sums ``out[i, p] = sum_{k in panel p} wt[k] * J0(R[i] * u[k])``.

    ``starts`` holds the first node index of each panel; panel ``p`` covers
    nodes ``starts[p]`` up to ``starts[p + 1]`` (or the end).
    """
    R = np.asarray(R, dtype=float)
    u = np.asarray(u, dtype=float)
    wt = np.asarray(wt, dtype=float)
    starts = np.asarray(starts, dtype=np.intp)
    out = np.empty((R.size, starts.size))
    chunk = max(1, 2_000_000 // max(u.size, 1))
    for lo in range(0, R.size, chunk):
        block = j0(np.multiply.outer(R[lo:lo + chunk], u)) * wt
        out[lo:lo + chunk] = np.add.reduceat(block, starts, axis=1)
    return out


def fft_radix2(x):
    """Unnormalized forward DFT with kernel exp(-2 pi i j t / N) along the last axis.

    Iterative decimation-in-time Cooley-Tukey; N must be a power of two.
    """
    x = np.array(x, dtype=complex, ndmin=1)
    n = x.shape[-1]
    if n & (n - 1) or n == 0:
        raise ValueError("length must be a power of two")
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    y = x[..., rev].copy()
    size = 2
    while size <= n:
        half = size // 2
        tw = np.exp(-2j * math.pi * np.arange(half) / size)
        y = y.reshape(y.shape[:-1] + (n // size, size))
        top = y[..., :half].copy()
        bot = y[..., half:] * tw
        y[..., :half] = top + bot
        y[..., half:] = top - bot
        y = y.reshape(y.shape[:-2] + (n,))
        size *= 2
    return y
