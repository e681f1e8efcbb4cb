"""Special functions and quadrature used by the statistical modules.

Modified Bessel functions of the first kind are evaluated in exponentially
scaled form, ``exp(-z) I_nu(z)``, so that concentrations in the tens or
hundreds never overflow. The ascending series is used for ``z <= 30`` (and
whenever the order is large relative to the argument), the large-argument
Hankel expansion beyond that.

The quadrature routines are small and self-contained: a globally adaptive
15-point Gauss-Kronrod rule for finite intervals, and a partial-sum scheme with
Wynn's epsilon acceleration for semi-infinite oscillatory integrals.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaincc, j0 as _scipy_j0, jn_zeros

from . import _backend
from .errors import ConvergenceError, DomainError

__all__ = [
    "QuadratureSpec",
    "normal_pdf_cdf",
    "bessel_i",
    "bessel_j0",
    "j0_zeros",
    "mean_resultant_A",
    "mean_resultant_A_prime",
    "inv_A",
    "chi2_quantile",
    "integrate",
    "wynn_epsilon",
]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def normal_pdf_cdf(x):
    """Standard normal density and distribution function at ``x``.

    Returns
    -------
    (pdf, cdf) : tuple of float
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"normal_pdf_cdf needs a finite argument, got {x}")
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x), 0.5 * math.erfc(-x / math.sqrt(2.0))


def _check_order(nu):
    nu = float(nu)
    if nu < 0.0 and nu != -0.5:
        raise DomainError(f"unsupported negative order {nu}; only -1/2 is allowed")
    return nu


def bessel_i(nu, z, scaled=False):
    """Modified Bessel function of the first kind ``I_nu(z)``.

    Parameters
    ----------
    nu : float
        Order; any non-negative real, or -1/2.
    z : float or array_like
        Argument(s), ``z >= 0``.
    scaled : bool
        Return ``exp(-z) * I_nu(z)`` instead. Use this for ``z > 30``; the
        unscaled value overflows near ``z = 710``.
    """
    nu = _check_order(nu)
    arr = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0):
        raise DomainError("bessel_i needs finite z >= 0")
    out = _backend.kernels.bessel_i_scaled(nu, arr)
    if not scaled:
        with np.errstate(over="ignore"):
            out = out * np.exp(arr)
    return out if np.ndim(z) else float(out)


def bessel_j0(z):
    """Bessel function of the first kind of order zero, ``z >= 0``."""
    arr = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0):
        raise DomainError("bessel_j0 needs finite z >= 0")
    out = _scipy_j0(arr)
    return out if np.ndim(z) else float(out)


def j0_zeros(count):
    """The first ``count`` positive zeros of ``J0``."""
    return jn_zeros(0, int(count))


def mean_resultant_A(kappa):
    """Von Mises mean resultant length ``A(kappa) = I1(kappa) / I0(kappa)``."""
    k = np.asarray(kappa, dtype=float)
    if np.any(k < 0.0) or np.any(np.isnan(k)):
        raise DomainError("kappa must be >= 0")
    kern = _backend.kernels
    with np.errstate(invalid="ignore"):
        out = kern.bessel_i_scaled(1.0, k) / kern.bessel_i_scaled(0.0, k)
    out = np.where(np.isinf(k), 1.0, out)
    return out if np.ndim(kappa) else float(out)


def mean_resultant_A_prime(kappa):
    """Derivative of ``A``: ``1 - A/kappa - A**2`` (1/2 at zero)."""
    kappa = float(kappa)
    if kappa == 0.0:
        return 0.5
    a = mean_resultant_A(kappa)
    return 1.0 - a / kappa - a * a


def _inv_A_guess(r):
    if r < 0.53:
        return 2.0 * r + r**3 + 5.0 * r**5 / 6.0
    if r < 0.85:
        return -0.4 + 1.39 * r + 0.43 / (1.0 - r)
    return 1.0 / (r**3 - 4.0 * r**2 + 3.0 * r)


def inv_A(r, tol=1e-13, max_iter=200):
    """Inverse of ``A`` on ``[0, 1)``.

    Starts from the usual piecewise rational approximation and polishes with
    Newton steps kept inside a bisection bracket.
    """
    r = float(r)
    if not (0.0 <= r < 1.0):
        raise DomainError(f"inv_A needs 0 <= r < 1, got {r}")
    if r == 0.0:
        return 0.0
    k = _inv_A_guess(r)
    lo, hi = 0.0, max(2.0 * k, 1.0 / (1.0 - r))
    while mean_resultant_A(hi) < r:
        hi *= 2.0
    for _ in range(max_iter):
        f = mean_resultant_A(k) - r
        if abs(f) <= tol * max(r, 1e-300) or abs(f) <= 1e-16:
            return k
        if f > 0.0:
            hi = min(hi, k)
        else:
            lo = max(lo, k)
        step = f / mean_resultant_A_prime(k)
        new = k - step
        if not (lo < new < hi):
            new = 0.5 * (lo + hi)
        if abs(new - k) <= 1e-15 * max(k, 1.0):
            return new
        k = new
    return k


def chi2_quantile(df, p, upper=True):
    """Quantile of the chi-square distribution with ``df`` degrees of freedom.

    With ``upper=True`` (the default) returns ``x`` such that
    ``P(chi2_df > x) = p``; otherwise ``P(chi2_df <= x) = p``. Found by
    bisection on the regularized upper incomplete gamma function.
    """
    df = int(df)
    p = float(p)
    if df < 1:
        raise DomainError("df must be >= 1")
    if not (0.0 < p < 1.0):
        raise DomainError(f"p must lie in (0, 1), got {p}")
    target = p if upper else 1.0 - p
    half = 0.5 * df

    def tail(x):
        return gammaincc(half, 0.5 * x)

    lo, hi = 0.0, max(1.0, float(df))
    while tail(hi) > target:
        lo, hi = hi, 2.0 * hi
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if tail(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for :func:`integrate`.

    ``max_subdivisions`` caps interval bisections on finite ranges and the
    number of panels summed on semi-infinite ranges.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    acceleration: str = "sequence_acceleration"

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise DomainError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if self.acceleration not in ("none", "sequence_acceleration"):
            raise DomainError(f"unknown acceleration {self.acceleration!r}")


# 15-point Kronrod nodes and weights with the embedded 7-point Gauss rule
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG_FULL = np.zeros(15)
_WG_FULL[1:7:2] = _WG[:3]
_WG_FULL[7] = _WG[3]
_WG_FULL[9:14:2] = _WG[2::-1]


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    centre = 0.5 * (a + b)
    vals = np.asarray(f(centre + half * _NODES), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError(f"integrand not finite on [{a}, {b}]")
    k = half * float(vals @ _WK)
    g = half * float(vals @ _WG_FULL)
    return k, abs(k - g)


def _adaptive(f, a, b, spec, points=()):
    edges = sorted({a, b, *[p for p in points if a < p < b]})
    heap = []
    total = 0.0
    err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, e = _gk15(f, lo, hi)
        heapq.heappush(heap, (-e, lo, hi, val))
        total += val
        err += e
    splits = 0
    while err > max(spec.abs_tol, spec.rel_tol * abs(total)):
        if splits >= spec.max_subdivisions:
            raise ConvergenceError("adaptive quadrature did not converge", total, err)
        neg_e, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            raise ConvergenceError("interval too small to bisect", total, err)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        total += v1 + v2 - val
        err += e1 + e2 + neg_e
        splits += 1
    return total, err


def wynn_epsilon(partial_sums):
    """Limit of a sequence by Wynn's epsilon algorithm.

    Returns ``(estimate, error)``; the estimate is the entry of the even
    columns whose distance to its neighbours is smallest.
    """
    s = np.asarray(partial_sums, dtype=float)
    if s.size == 0:
        raise ValueError("empty sequence")
    if s.size < 3:
        return float(s[-1]), (abs(s[-1] - s[-2]) if s.size == 2 else math.inf)
    best = float(s[-1])
    best_err = abs(s[-1] - s[-2]) + abs(s[-2] - s[-3])
    prev = np.zeros(s.size + 1)
    cur = s.copy()
    last_even = cur
    col = 0
    while cur.size > 1:
        d = np.diff(cur)
        scale = np.maximum(np.abs(cur[1:]), np.abs(cur[:-1]))
        if np.any(np.abs(d) <= 1e-15 * scale + 1e-300):
            break
        nxt = prev[1:cur.size] + 1.0 / d
        prev, cur = cur, nxt
        col += 1
        if col % 2 == 0:
            if cur.size >= 3:
                est = float(cur[-1])
                e = abs(cur[-1] - cur[-2]) + abs(cur[-1] - cur[-3])
                e = max(e, abs(est - last_even[-1]) if last_even.size else 0.0)
                if e < best_err:
                    best, best_err = est, e
            last_even = cur
    return best, best_err


def _integrate_oscillatory(f, a, zeros, spec):
    if callable(zeros):
        breaks = [zeros(k) for k in range(1, 64)]
    else:
        breaks = list(zeros)
    breaks = [a] + [z for z in breaks if z > a]
    panel_spec = QuadratureSpec(spec.abs_tol * 1e-2, spec.rel_tol * 1e-2, spec.max_subdivisions, "none")
    sums = []
    total = 0.0
    previous = None
    k = 0
    while True:
        while k + 1 >= len(breaks):
            if not callable(zeros):
                # extend with the asymptotic spacing of the supplied zeros
                step = breaks[-1] - breaks[-2]
                breaks.append(breaks[-1] + step)
            else:
                breaks.append(zeros(len(breaks)))
        val, _ = _adaptive(f, breaks[k], breaks[k + 1], panel_spec)
        total += val
        sums.append(total)
        k += 1
        if len(sums) >= 8:
            est, err = wynn_epsilon(sums[-48:])
            if previous is not None:
                tol = max(spec.abs_tol, spec.rel_tol * abs(est))
                if abs(est - previous) <= tol and err <= 10 * tol:
                    return est
            previous = est
        if k >= spec.max_subdivisions:
            raise ConvergenceError("oscillatory integral did not converge", previous or total, math.inf)


def integrate(f: Callable, a: float, b: float, spec: QuadratureSpec | None = None, *, points=(), zeros=None):
    """Integrate ``f`` over ``[a, b]``; ``b`` may be ``inf``.

    ``f`` must accept a NumPy array of abscissae. ``points`` are interior
    breakpoints (kinks, singularities) for finite ranges. For ``b = inf`` with
    sequence acceleration, ``zeros`` gives the ascending sign changes of the
    oscillating factor (a sequence or a callable ``k -> k``-th zero, 1-based);
    the integral is summed panel by panel and the partial sums accelerated.

    Raises
    ------
    ConvergenceError
        When the tolerance is not met within ``spec.max_subdivisions``.
    """
    spec = spec or QuadratureSpec()
    if math.isinf(b):
        if zeros is not None and spec.acceleration == "sequence_acceleration":
            return _integrate_oscillatory(f, a, zeros, spec)

        def mapped(t):
            return f(a + t / (1.0 - t)) / (1.0 - t) ** 2

        return _adaptive(mapped, 0.0, 1.0, spec)[0]
    if b < a:
        return -integrate(f, b, a, spec, points=points)
    if a == b:
        return 0.0
    return _adaptive(f, a, b, spec, points)[0]
