"""Sampling distributions of the resultant ``R = n Rbar`` and of ``CSM = Rbar**2``.

Under uniformity the density of ``R`` is the Hankel-type integral

    h_n(R) = R * int_0^inf u J0(R u) J0(u)**n du,

which converges only conditionally for small ``n``. It is evaluated as a sum
of integrals over the intervals between consecutive zeros of ``J0(u)``, each
panel split into Gauss-Legendre sub-panels fine enough for the faster factor
``J0(R u)``, and the partial sums are accelerated with Wynn's epsilon
algorithm. The per-node Bessel sums run in the compiled kernel when available.

The von Mises resultant density is ``I0(kappa R) / I0(kappa)**n * h_n(R)``;
for PIN data the same formula is used with ``kappa`` from the moment-matching
approximation (a plug-in, not exact).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import j0, jn_zeros

from . import _backend, rng
from .errors import ConvergenceError, DomainError, UnsupportedCaseError
from .pin import draw_pin_angles, pin_cos_moment, pin_rho
from .special import QuadratureSpec, bessel_i, integrate
from .vm_approx import approx1_kappa

__all__ = [
    "ResultantDensitySpec",
    "CosineDependenceParams",
    "AsymptoticMoments",
    "uniform_resultant_pdf",
    "vm_resultant_pdf",
    "resultant_pdf",
    "csm_pdf",
    "resultant_cdf",
    "resultant_mass",
    "csm_cdf",
    "ks_distance",
    "stephens_transform",
    "gamma_star",
    "n2_resultant_pdf",
    "rbar_asymptotics",
    "monte_carlo_csm",
]

MODELS = ("uniform", "von_mises", "pin_approx1")

DEFAULT_QUADRATURE = QuadratureSpec(abs_tol=1e-9, rel_tol=1e-9, max_subdivisions=1 << 15)


@dataclass(frozen=True)
class ResultantDensitySpec:
    """Sample size, null/alternative model and quadrature settings.

    ``param`` is ``kappa`` for ``von_mises`` and ``gamma`` for ``pin_approx1``;
    it is ignored for ``uniform``.
    """

    n: int
    model: str = "uniform"
    param: float = 0.0
    quadrature: QuadratureSpec = field(default=DEFAULT_QUADRATURE)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("n must be an integer >= 2")
        if self.model not in MODELS:
            raise DomainError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if not (self.param >= 0.0) or math.isinf(self.param):
            raise DomainError("model parameter must be finite and >= 0")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "param", float(self.param))

    @property
    def kappa(self):
        """Von Mises concentration of the model (0 for uniform)."""
        if self.model == "uniform":
            return 0.0
        if self.model == "von_mises":
            return self.param
        return approx1_kappa(self.param)


@dataclass(frozen=True)
class CosineDependenceParams:
    """Association parameter of ``f(t1, t2) ~ exp(lam cos(t1 - t2))``."""

    lam: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.lam):
            raise DomainError("lambda must be finite")


@dataclass(frozen=True)
class AsymptoticMoments:
    """Large-sample moments of ``Cbar``, ``Sbar``, ``Rbar`` and ``CSM``."""

    mean_C: float
    mean_S: float
    var_C: float
    var_S: float
    mean_Rbar: float
    mean_CSM: float
    var_Rbar: float
    var_CSM: float


# ---------------------------------------------------------------------------
# h_n(R) by panel sums between zeros of J0(u)

_GL_ORDER = 10
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)
_NODES_PER_WAVE = 12.0
_FIRST_PANELS = 48
_TAIL = 40  # partial sums fed to the accelerator


@lru_cache(maxsize=8)
def _j0_breaks(count):
    z = np.concatenate([[0.0], jn_zeros(0, count)])
    z.setflags(write=False)
    return z


def _panel_nodes(n, freq, panels):
    breaks = _j0_breaks(panels)
    widths = np.diff(breaks)
    per = np.maximum(1, np.ceil(freq * widths * _NODES_PER_WAVE / (2.0 * math.pi * _GL_ORDER))).astype(int)
    u_parts, w_parts, starts = [], [], []
    pos = 0
    for p in range(panels):
        m = per[p]
        edges = np.linspace(breaks[p], breaks[p + 1], m + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        u = (mid[:, None] + half[:, None] * _GL_X).ravel()
        u_parts.append(u)
        w_parts.append((half[:, None] * _GL_W).ravel())
        starts.append(pos)
        pos += u.size
    u = np.concatenate(u_parts)
    w = np.concatenate(w_parts)
    return u, w, w * u * j0(u) ** n, np.asarray(starts, dtype=np.intp)


# Near R = m (an integer with the parity of n) every component of the
# integrand has a frequency m' +- R close to an even integer, so partial sums
# over panels of length ~pi hardly oscillate and acceleration fails. For those
# R the integral is split at U0, a zero of J0 beyond _SPLIT_AT. The head is
# plain Gauss-Legendre. Beyond U0 each Bessel factor is replaced by its Hankel
# expansion, J0(x) = Re H(x) with
# H(x) ~ sqrt(2/(pi x)) exp(i(x - pi/4)) S(x), S(x) = sum_j i^j a_j / x^j.
# The product splits into n + 1 conjugate pairs exp(i w u) G_k(u),
# w = 2k - n + R, and each tail is integrated along a ray into the half plane
# where exp(i w z) decays.

_HANKEL_TERMS = 11
_HANKEL_A = np.ones(_HANKEL_TERMS)
for _j in range(1, _HANKEL_TERMS):
    _HANKEL_A[_j] = _HANKEL_A[_j - 1] * -((2 * _j - 1) ** 2) / (8.0 * _j)
_SPLIT_AT = 60.0
_NEAR = 0.5
_RAY_X, _RAY_W = np.polynomial.legendre.leggauss(16)
_RAY_CHUNK = 512


def _hankel_series(x, sign):
    out = np.zeros(np.shape(x), dtype=complex)
    inv = 1.0 / x
    powr = np.ones(np.shape(x), dtype=complex)
    for j in range(_HANKEL_TERMS):
        out += (sign * 1j) ** j * _HANKEL_A[j] * powr
        powr = powr * inv
    return out


def _near_integer(R, n):
    m = n - 2.0 * np.round((n - R) / 2.0)
    return (m >= 1) & (np.abs(m - R) < _NEAR) & (R >= 0.5)


def _ray_integrals(R, k, n, start):
    """``2 Re int_start^inf G_k(u) exp(i w u) du`` for paired arrays ``R``, ``k``."""
    w = 2.0 * k - n + R
    sgn = np.where(w < 0, -1.0, 1.0)
    aw = np.abs(w)
    scale = np.where(aw * start > 1.0, 1.0 / np.maximum(aw, 1e-300), start)
    with np.errstate(divide="ignore"):
        reach = np.where(aw > 0, np.log1p(40.0 / (aw * scale)) + 1.0, 80.0)
    reach = np.minimum(reach, 80.0)
    out = np.empty(R.size)
    order = np.argsort(reach)
    for lo in range(0, R.size, _RAY_CHUNK):
        idx = order[lo:lo + _RAY_CHUNK]
        edges = np.arange(0.0, reach[idx].max() + 0.5, 0.5)
        x = ((0.5 * (edges[1:] + edges[:-1]))[:, None] + 0.25 * _RAY_X).ravel()
        wx = np.tile(0.25 * _RAY_W, edges.size - 1)
        y = scale[idx, None] * np.expm1(x)[None, :]
        dy = scale[idx, None] * (np.exp(x) * wx)[None, :]
        z = start + 1j * sgn[idx, None] * y
        kk = k[idx, None]
        rr = R[idx, None]
        binom = np.array([math.comb(n, int(v)) for v in k[idx]], dtype=float)[:, None]
        c = (2.0 ** -(n + 1)) * binom * (2.0 / math.pi) ** (0.5 * (n + 1)) / np.sqrt(rr)
        c = c * np.exp(-0.25j * math.pi * (2 * kk - n + 1))
        G = c * z ** (0.5 * (1 - n)) * _hankel_series(z, 1.0) ** kk * _hankel_series(z, -1.0) ** (n - kk)
        G = G * _hankel_series(rr * z, 1.0)
        phase = np.exp(1j * w[idx, None] * start) * np.exp(-aw[idx, None] * y)
        vals = 2.0 * np.real(1j * sgn[idx, None] * G * phase)
        out[idx] = np.sum(vals * dy, axis=1)
    if n == 3:
        out = np.where(w == 0.0, np.inf, out)
    return out


def _split_integral(R, n, kern):
    breaks = _j0_breaks(_FIRST_PANELS)
    p0 = int(np.searchsorted(breaks, _SPLIT_AT))
    start = breaks[p0]
    u, _, wt, starts = _panel_nodes(n, float(np.max(R)) + n, p0)
    head = kern.weighted_j0_panel_sums(R, u, wt, starts).sum(axis=1)
    rr = np.repeat(R, n + 1)
    kk = np.tile(np.arange(n + 1), R.size)
    tails = _ray_integrals(rr, kk, n, start).reshape(R.size, n + 1).sum(axis=1)
    return head + tails


def _integral_rows(R, n, panels, kern):
    u, _, wt, starts = _panel_nodes(n, float(np.max(R)) + n, panels)
    return np.cumsum(kern.weighted_j0_panel_sums(R, u, wt, starts), axis=1)


def _bessel_integral(R, n, spec, strict=True):
    """``int_0^inf u J0(R u) J0(u)**n du`` for an array of ``R > 0``."""
    kern = _backend.kernels
    R = np.asarray(R, dtype=float)
    out = np.empty_like(R)
    near = _near_integer(R, n)
    if near.any():
        out[near] = _split_integral(R[near], n, kern)
    todo = np.flatnonzero(~near)
    panels = _FIRST_PANELS
    while todo.size:
        partial = _integral_rows(R[todo], n, panels, kern)
        full, err_full = _wynn_rows(partial[:, -_TAIL:])
        short, _ = _wynn_rows(partial[:, -_TAIL - 6:-6])
        err = np.abs(full - short) + err_full
        tol = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(full))
        ok = err <= tol
        out[todo[ok]] = full[ok]
        todo = todo[~ok]
        if todo.size and 2 * panels > spec.max_subdivisions:
            if strict:
                i = todo[0]
                bad = int(np.flatnonzero(~ok)[0])
                raise ConvergenceError(f"resultant integral at R={R[i]!r}, n={n} did not converge",
                                       float(full[bad]), float(err[bad]))
            out[todo] = full[~ok]
            break
        panels *= 2
    return out


def _wynn_rows(S):
    """Row-wise Wynn epsilon; returns (estimate, error) arrays."""
    S = np.asarray(S, dtype=float)
    rows, m = S.shape
    best = S[:, -1].copy()
    best_err = np.abs(S[:, -1] - S[:, -2]) + np.abs(S[:, -2] - S[:, -3])
    alive = np.ones(rows, dtype=bool)
    prev = np.zeros((rows, m + 1))
    cur = S.copy()
    col = 0
    last_even = S
    while cur.shape[1] > 1:
        d = np.diff(cur, axis=1)
        scale = np.maximum(np.abs(cur[:, 1:]), np.abs(cur[:, :-1]))
        tiny = np.abs(d) <= 1e-15 * scale + 1e-300
        alive &= ~tiny.any(axis=1)
        if not alive.any():
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = prev[:, 1:cur.shape[1]] + 1.0 / np.where(tiny, 1.0, d)
        prev, cur = cur, nxt
        col += 1
        if col % 2 == 0 and cur.shape[1] >= 3:
            est = cur[:, -1]
            err = np.abs(cur[:, -1] - cur[:, -2]) + np.abs(cur[:, -1] - cur[:, -3])
            err = np.maximum(err, np.abs(est - last_even[:, -1]))
            better = alive & np.isfinite(est) & (err < best_err)
            best = np.where(better, est, best)
            best_err = np.where(better, err, best_err)
            last_even = cur
    return best, best_err


def _check_R(R, n):
    arr = np.asarray(R, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= n):
        raise DomainError(f"R must lie in (0, {n})")
    return arr


def _uniform_h(R, n, spec, strict=True):
    if n == 2:
        return 2.0 / (math.pi * np.sqrt(4.0 - R * R))
    return np.maximum(R * _bessel_integral(R, n, spec, strict), 0.0)


def uniform_resultant_pdf(R, n, spec=None):
    """Density ``h_n(R)`` of the resultant length of ``n`` uniform unit vectors.

    Parameters
    ----------
    R : float or array_like
        Resultant length(s), ``0 < R < n``.
    n : int
        Sample size, ``n >= 2``. ``n = 2`` uses the closed form
        ``2 / (pi sqrt(4 - R**2))``.
    spec : QuadratureSpec, optional
        Tolerances for the oscillatory integral.
    """
    n = int(n)
    if n < 2:
        raise DomainError("n must be >= 2")
    arr = _check_R(R, n)
    out = _uniform_h(arr.reshape(-1), n, spec or DEFAULT_QUADRATURE).reshape(arr.shape)
    return out if np.ndim(R) else float(out)


def _vm_factor(R, n, kappa):
    # I0(kappa R) / I0(kappa)**n in scaled form
    if kappa == 0.0:
        return np.ones_like(R)
    log_num = kappa * R + np.log(bessel_i(0, kappa * R, scaled=True))
    log_den = n * (kappa + math.log(bessel_i(0, kappa, scaled=True)))
    return np.exp(log_num - log_den)


def vm_resultant_pdf(R, n, kappa, spec=None):
    """Density of the resultant length for ``n`` von Mises(kappa) angles."""
    n = int(n)
    if n < 2:
        raise DomainError("n must be >= 2")
    kappa = float(kappa)
    if not (kappa >= 0.0) or math.isinf(kappa):
        raise DomainError("kappa must be finite and >= 0")
    arr = _check_R(R, n).reshape(-1)
    out = _uniform_h(arr, n, spec or DEFAULT_QUADRATURE) * _vm_factor(arr, n, kappa)
    out = np.maximum(out, 0.0).reshape(np.shape(R))
    return out if np.ndim(R) else float(out)


def resultant_pdf(R, spec):
    """Resultant density under ``spec.model`` (see :class:`ResultantDensitySpec`)."""
    return vm_resultant_pdf(R, spec.n, spec.kappa, spec.quadrature)


def csm_pdf(v, spec):
    """Density of ``CSM = Rbar**2`` on ``(0, 1)``.

    With ``R = n sqrt(v)`` this is ``resultant_pdf(R) * n / (2 sqrt(v))``, i.e.
    ``(n**2 / 2) * int_0^inf u J0(n sqrt(v) u) J0(u)**n du`` under uniformity.
    """
    arr = np.asarray(v, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("v must lie in (0, 1)")
    root = np.sqrt(arr)
    out = resultant_pdf(spec.n * root, spec) * spec.n / (2.0 * root)
    return out if np.ndim(v) else float(out)


# ---------------------------------------------------------------------------
# distribution functions on a grid

_CELLS_PER_UNIT = 48
_GRADING = 10
_CDF_GL = 8


def _cdf_edges(n):
    # uniform cells on each unit interval, graded towards the integers where
    # h_n has kinks or logarithmic peaks
    edges = [np.linspace(0.0, n, n * _CELLS_PER_UNIT + 1)]
    cell = 1.0 / _CELLS_PER_UNIT
    fine = cell * 2.0 ** -np.arange(1, _GRADING + 1)
    for k in range(n + 1):
        if k > 0:
            edges.append(k - fine)
        if k < n:
            edges.append(k + fine)
    return np.unique(np.concatenate(edges))


@lru_cache(maxsize=16)
def _uniform_grid(n, spec):
    x, w = np.polynomial.legendre.leggauss(_CDF_GL)
    if n == 2:
        # R = 2 sin(s) removes the inverse square root at R = 2
        s_edges = np.linspace(0.0, 0.5 * math.pi, 2 * _CELLS_PER_UNIT + 1)
        half = 0.5 * np.diff(s_edges)
        mid = 0.5 * (s_edges[1:] + s_edges[:-1])
        s_nodes = (mid[:, None] + half[:, None] * x).ravel()
        edges = 2.0 * np.sin(s_edges)
        nodes = 2.0 * np.sin(s_nodes)
        weights = (half[:, None] * w).ravel() * 2.0 * np.cos(s_nodes)
    else:
        edges = _cdf_edges(n)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes = (mid[:, None] + half[:, None] * x).ravel()
        weights = (half[:, None] * w).ravel()
    h = _uniform_h(nodes, n, spec, strict=False)
    for a in (edges, nodes, weights, h):
        a.setflags(write=False)
    return edges, nodes, weights, h


@lru_cache(maxsize=32)
def _cdf_table(spec):
    edges, nodes, weights, h = _uniform_grid(spec.n, spec.quadrature)
    dens = h * _vm_factor(nodes, spec.n, spec.kappa)
    cell_mass = (dens * weights).reshape(-1, _CDF_GL).sum(axis=1)
    cdf = np.concatenate([[0.0], np.cumsum(cell_mass)])
    total = cdf[-1]
    cdf = cdf / total
    cdf.setflags(write=False)
    return edges, cdf, total


def resultant_cdf(R, spec):
    """Distribution function of ``R`` by Gauss-Legendre integration on a graded grid.

    The table is cached per ``spec``; values between grid edges are linearly
    interpolated.
    """
    edges, cdf, _ = _cdf_table(spec)
    return np.interp(np.asarray(R, dtype=float), edges, cdf)


def resultant_mass(spec):
    """Total mass of the resultant density on the cdf grid (1 up to quadrature error)."""
    return float(_cdf_table(spec)[2])


def csm_cdf(v, spec):
    """Distribution function of ``CSM``; ``P(CSM <= v) = P(R <= n sqrt(v))``."""
    v = np.clip(np.asarray(v, dtype=float), 0.0, 1.0)
    return resultant_cdf(spec.n * np.sqrt(v), spec)


def ks_distance(sample, cdf):
    """Kolmogorov-Smirnov distance between ``sample`` and the callable ``cdf``."""
    x = np.sort(np.asarray(sample, dtype=float))
    m = x.size
    F = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, m + 1) / m - F
    lower = F - np.arange(0, m) / m
    return float(max(upper.max(), lower.max()))


# ---------------------------------------------------------------------------
# Stephens large-kappa approximation

def gamma_star(kappa):
    """``1 / (1/kappa + 3/(8 kappa**2))``; warns below ``kappa = 4``."""
    kappa = float(kappa)
    if not kappa > 0.0:
        raise DomainError("kappa must be > 0")
    if kappa < 4.0:
        warnings.warn(f"Stephens approximation is intended for kappa >= 4 (got {kappa:g})", RuntimeWarning, stacklevel=2)
    return 1.0 / (1.0 / kappa + 3.0 / (8.0 * kappa * kappa))


def stephens_transform(R_bar, n, kappa):
    """Statistic ``2 n gamma* (1 - Rbar)``, approximately chi-square with ``n - 1`` df."""
    R_bar = np.asarray(R_bar, dtype=float)
    if np.any(R_bar < 0.0) or np.any(R_bar > 1.0):
        raise DomainError("R_bar must lie in [0, 1]")
    out = 2.0 * int(n) * gamma_star(kappa) * (1.0 - R_bar)
    return out if np.ndim(R_bar) else float(out)


# ---------------------------------------------------------------------------
# n = 2

def n2_resultant_pdf(R, model="generic", f=None, lam=None, spec=None):
    """Density of the resultant of two angles.

    Parameters
    ----------
    R : float
        ``0 < R < 2``.
    model : {"generic", "cosine"}
        ``generic`` integrates a supplied density numerically: ``f`` is either
        a circular density of one angle (the pair is independent) or, when it
        takes two arguments, a joint density ``f(t1, t2)``. ``cosine`` uses the
        closed form for ``f(t1, t2) = exp(lam cos(t1 - t2)) / (4 pi**2 I0(lam))``.
    """
    R = float(R)
    if not (0.0 < R < 2.0):
        raise DomainError("R must lie in (0, 2)")
    root = math.sqrt(4.0 - R * R)
    if model == "cosine":
        lam = float(lam if lam is not None else 0.0)
        CosineDependenceParams(lam)
        # cos(t1 - t2) = R**2 / 2 - 1 on the level set
        log_num = lam * (0.5 * R * R - 1.0)
        log_den = abs(lam) + math.log(bessel_i(0, abs(lam), scaled=True))
        return 2.0 * math.exp(log_num - log_den) / (math.pi * root)
    if model != "generic":
        raise UnsupportedCaseError(f"unknown n = 2 model {model!r}")
    if f is None:
        raise DomainError("generic model needs a density f")
    t = math.acos(0.5 * R)
    try:
        f(0.0, 0.0)
        joint = True
    except TypeError:
        joint = False
    if joint:
        def g(u):
            return np.asarray(f(u - t, u + t)) + np.asarray(f(u + t, u - t))
        scale = 2.0
    else:
        def g(u):
            return np.asarray(f(u - t)) * np.asarray(f(u + t))
        scale = 4.0
    spec = spec or QuadratureSpec(1e-13, 1e-11, 500, "none")
    return scale * integrate(g, 0.0, 2.0 * math.pi, spec) / root


# ---------------------------------------------------------------------------
# moments and Monte Carlo

def rbar_asymptotics(gamma, n):
    """Moments of ``Cbar``, ``Sbar``, ``Rbar`` and ``CSM`` for PIN(gamma) samples of size ``n``.

    ``var_C = (1 + alpha2 - 2 alpha**2) / (2 n)`` and ``var_S = (1 - alpha2) / (2 n)``
    are exact; ``mean_CSM = alpha**2 + (1 - alpha**2) / n`` is exact. For
    ``gamma > 0`` the ``Rbar`` moments are the first-order normal approximation
    (``Rbar ~ Cbar``); ``gamma = 0`` uses the uniform large-``n`` values.
    """
    gamma = float(gamma)
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    if not (gamma >= 0.0):
        raise DomainError("gamma must be >= 0")
    alpha = pin_rho(gamma)
    alpha2 = pin_cos_moment(2, gamma)
    var_C = (1.0 + alpha2 - 2.0 * alpha * alpha) / (2.0 * n)
    var_S = (1.0 - alpha2) / (2.0 * n)
    mean_csm = alpha * alpha + (1.0 - alpha * alpha) / n
    if gamma == 0.0:
        return AsymptoticMoments(0.0, 0.0, var_C, var_S, math.sqrt(math.pi / (4.0 * n)),
                                 1.0 / n, (1.0 - math.pi / 4.0) / n, 1.0 / n**2)
    return AsymptoticMoments(alpha, 0.0, var_C, var_S, alpha, mean_csm, var_C,
                             4.0 * alpha * alpha * var_C)


def _csm_block(gamma, n):
    def draw(gen, count):
        theta = draw_pin_angles(gen, (count, n), gamma)
        c = np.cos(theta).mean(axis=1)
        s = np.sin(theta).mean(axis=1)
        return c * c + s * s
    return draw


def monte_carlo_csm(gamma, n, reps, seed, workers=None):
    """Simulated CSM values for ``reps`` PIN(0, gamma) samples of size ``n``.

    Replicates are generated in blocks of :data:`pinsync.rng.BLOCK`, each from
    its own seeded stream, so the output does not depend on ``workers``.
    """
    gamma = float(gamma)
    if not (gamma >= 0.0):
        raise DomainError("gamma must be >= 0")
    if int(n) < 1 or int(reps) < 1:
        raise DomainError("n and reps must be >= 1")
    return rng.run_blocks(int(reps), seed, _csm_block(gamma, int(n)), workers)
