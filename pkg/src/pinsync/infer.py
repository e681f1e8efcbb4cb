"""Tests of uniformity and of equal concentration, and confidence intervals.

Rayleigh's test rejects uniformity for large ``Rbar``. Three critical-value
flavors are offered: ``chi2`` (``2 n Rbar**2 ~ chi2_2``), ``normal``
(``n Rbar**2 - 1`` referred to a standard normal) and
``stephens_exact_table`` (tabulated exact values).

Intervals for ``kappa`` come from the large-concentration chi-square
approximation for ``n - R``; they are carried to ``gamma`` (divide by four, or
invert Approx 1 exactly) and to the CSM through ``rho(gamma)**2``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import f as f_dist

from .errors import ConvergenceError, DomainError, UnsupportedCaseError
from .estimate import (CircularSummary, _angles, _gamma_root, _mu_step, circ_summary,
                       pin_loglik, pin_mle)
from .pin import pin_rho
from .special import chi2_quantile, inv_A
from .vm_approx import approx1_kappa

__all__ = [
    "TestResult",
    "ConfidenceInterval",
    "STEPHENS_EXACT",
    "rayleigh_test",
    "lrt_uniformity",
    "two_sample_lrt",
    "two_sample_F",
    "kappa_ci",
    "gamma_ci",
    "csm_ci",
    "csm_interval",
]

# exact 5% critical value of Rbar for n = 12
STEPHENS_EXACT = {(12, 0.05): 0.494}


@dataclass(frozen=True)
class TestResult:
    """Outcome of a hypothesis test.

    ``p_value`` is ``None`` when the method provides only a critical value.
    ``df`` is the chi-square degrees of freedom where one applies.
    """

    __test__ = False  # not a pytest class

    statistic: float
    critical_value: float
    p_value: float | None
    alpha: float
    reject: bool
    method: str
    df: int | None = None
    note: str = ""


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    target: str

    def __post_init__(self):
        if self.lower > self.upper:
            raise DomainError("lower bound exceeds upper bound")
        if not (0.0 < self.level < 1.0):
            raise DomainError("level must lie in (0, 1)")
        if self.target not in ("kappa", "gamma", "csm"):
            raise DomainError(f"unknown target {self.target!r}")


def _check_alpha(alpha):
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise DomainError("alpha must lie in (0, 1)")
    return alpha


def _chi2_sf(x, df):
    from scipy.special import gammaincc

    return float(gammaincc(0.5 * df, 0.5 * max(x, 0.0)))


def rayleigh_test(summary, alpha=0.05, flavor="chi2"):
    """Rayleigh test of uniformity on the ``Rbar**2`` scale.

    Parameters
    ----------
    summary : CircularSummary
    alpha : float
    flavor : {"chi2", "normal", "stephens_exact_table"}
        ``chi2``: critical ``Rbar**2 = ln(1/alpha) / n``.
        ``normal``: critical ``Rbar**2 = (1 + z) / n`` with ``z`` the upper
        ``alpha/2`` normal point; the p-value is the matching two-sided one.
        ``stephens_exact_table``: tabulated exact critical ``Rbar``.
    """
    if not isinstance(summary, CircularSummary):
        summary = circ_summary(summary)
    alpha = _check_alpha(alpha)
    n = summary.n
    if n < 2:
        raise DomainError("the Rayleigh test needs n >= 2")
    stat = summary.csm
    if flavor == "chi2":
        crit = math.log(1.0 / alpha) / n
        p = math.exp(-n * stat)
    elif flavor == "normal":
        z = float(ndtri(1.0 - 0.5 * alpha))
        crit = (1.0 + z) / n
        p = float(math.erfc(abs(n * stat - 1.0) / math.sqrt(2.0)))
        p = p if n * stat >= 1.0 else 1.0
    elif flavor == "stephens_exact_table":
        key = (n, round(alpha, 10))
        if key not in STEPHENS_EXACT:
            raise UnsupportedCaseError(f"no exact critical value tabulated for n={n}, alpha={alpha}")
        crit = STEPHENS_EXACT[key] ** 2
        p = None
    else:
        raise DomainError(f"unknown flavor {flavor!r}")
    return TestResult(stat, crit, p, alpha, bool(stat >= crit), f"rayleigh_{flavor}")


def lrt_uniformity(sample, alpha=0.05, mu=None, gamma=None):
    """Likelihood ratio test of uniformity against a PIN alternative.

    With ``mu`` and ``gamma`` given, the simple alternative is used; otherwise
    both are replaced by their joint maximum likelihood estimates. The
    statistic ``2 (loglik - (-n log 2 pi))`` is referred to chi-square with
    2 degrees of freedom (approximate).
    """
    alpha = _check_alpha(alpha)
    theta = _angles(sample)
    if theta.size < 2:
        raise DomainError("the test needs n >= 2")
    if (mu is None) != (gamma is None):
        raise DomainError("give both mu and gamma for the simple alternative, or neither")
    if mu is None:
        fit = pin_mle(theta, "joint")
        ll = fit.loglik
        method = "lrt_uniformity"
    else:
        ll = pin_loglik(theta, mu, gamma)
        method = "lrt_uniformity_simple"
    stat = max(0.0, 2.0 * (ll + theta.size * math.log(2.0 * math.pi)))
    crit = chi2_quantile(2, alpha)
    return TestResult(stat, crit, _chi2_sf(stat, 2), alpha, bool(stat >= crit), method, 2,
                      "chi-square reference is approximate")


def _common_gamma_fit(samples, max_sweeps=200, tol=1e-10):
    """Maximize sum_j loglik_j(mu_j, gamma) over separate mu_j and one gamma."""
    thetas = [_angles(s) for s in samples]
    mus = [circ_summary(t).theta_bar for t in thetas]
    pooled = np.concatenate([t - m for t, m in zip(thetas, mus)])
    r_bar = circ_summary(pooled).R_bar
    gamma, _ = _gamma_root(pooled, r_bar)
    ll = sum(pin_loglik(t, m, gamma) for t, m in zip(thetas, mus))
    for _ in range(max_sweeps):
        new_mus = [_mu_step(t, m, gamma) for t, m in zip(thetas, mus)]
        pooled = np.concatenate([t - m for t, m in zip(thetas, new_mus)])
        new_gamma, _ = _gamma_root(pooled, r_bar)
        new_ll = sum(pin_loglik(t, m, new_gamma) for t, m in zip(thetas, new_mus))
        step = max(max(abs(a - b) for a, b in zip(new_mus, mus)), abs(new_gamma - gamma) / max(1.0, gamma))
        if new_ll < ll:
            return ll
        mus, gamma, ll = new_mus, new_gamma, new_ll
        if step < tol:
            return ll
    raise ConvergenceError("common-gamma fit did not settle", gamma, step)


def two_sample_lrt(sample1, sample2, alpha=0.05, null="common"):
    """Likelihood ratio test for two PIN samples.

    Parameters
    ----------
    null : {"common", "common_gamma"}
        ``common``: both samples share ``mu`` and ``gamma`` (2 constraints).
        ``common_gamma``: shared ``gamma``, separate ``mu`` (1 constraint).
    """
    alpha = _check_alpha(alpha)
    t1, t2 = _angles(sample1), _angles(sample2)
    alt = pin_mle(t1, "joint").loglik + pin_mle(t2, "joint").loglik
    if null == "common":
        null_ll = pin_mle(np.concatenate([t1, t2]), "joint").loglik
        df = 2
    elif null == "common_gamma":
        null_ll = _common_gamma_fit([t1, t2])
        df = 1
    else:
        raise DomainError(f"unknown null {null!r}")
    stat = max(0.0, 2.0 * (alt - null_ll))
    crit = chi2_quantile(df, alpha)
    return TestResult(stat, crit, _chi2_sf(stat, df), alpha, bool(stat >= crit), f"two_sample_lrt_{null}", df,
                      "chi-square reference is approximate")


def two_sample_F(summary1, summary2, alpha=0.05):
    """Two-sided F test of equal von Mises concentration.

    The statistic is ``[n2 (1 - Rbar2) / (n2 - 1)] / [n1 (1 - Rbar1) / (n1 - 1)]``,
    which for equal sample sizes is ``(1 - Rbar2) / (1 - Rbar1)``, referred to
    F with ``(n2 - 1, n1 - 1)`` degrees of freedom. ``critical_value`` is the
    upper ``alpha/2`` point.
    """
    s1 = summary1 if isinstance(summary1, CircularSummary) else circ_summary(summary1)
    s2 = summary2 if isinstance(summary2, CircularSummary) else circ_summary(summary2)
    alpha = _check_alpha(alpha)
    n1, n2 = s1.n, s2.n
    if n1 < 2 or n2 < 2:
        raise DomainError("both samples need n >= 2")
    d1, d2 = n2 - 1, n1 - 1
    num = n2 * (1.0 - s2.R_bar) / (n2 - 1)
    den = n1 * (1.0 - s1.R_bar) / (n1 - 1)
    upper = float(f_dist.isf(0.5 * alpha, d1, d2))
    lower = float(f_dist.ppf(0.5 * alpha, d1, d2))
    if den == 0.0:
        return TestResult(math.inf, upper, 0.0, alpha, True, "two_sample_F", note="Rbar1 = 1: infinite statistic")
    stat = num / den
    p = min(1.0, 2.0 * min(float(f_dist.sf(stat, d1, d2)), float(f_dist.cdf(stat, d1, d2))))
    return TestResult(stat, upper, p, alpha, bool(stat >= upper or stat <= lower), "two_sample_F")


def _kappa_from_a(a):
    return (1.0 + math.sqrt(1.0 + 3.0 * a)) / (4.0 * a)


def kappa_ci(R, n, alpha=0.05):
    """Approximate ``1 - alpha`` interval for the von Mises concentration.

    ``R`` is the resultant length ``n * Rbar``. With ``q_hi`` and ``q_lo`` the
    upper ``alpha/2`` and ``1 - alpha/2`` points of chi-square on ``n - 1`` df,
    ``a = (n - R) / q_lo`` and ``b = (n - R) / q_hi`` give the bounds
    ``(1 + sqrt(1 + 3 a)) / (4 a)`` and ``(1 + sqrt(1 + 3 b)) / (4 b)``.
    Intended for ``kappa_hat >= 2``; a warning is issued below that.
    """
    alpha = _check_alpha(alpha)
    n = int(n)
    R = float(R)
    if n < 2:
        raise DomainError("n must be >= 2")
    if not (0.0 <= R < n):
        raise DomainError(f"R must lie in [0, n), got {R}")
    kappa_hat = inv_A(R / n)
    if kappa_hat < 2.0:
        warnings.warn(f"kappa interval is unreliable for kappa_hat = {kappa_hat:.3g} < 2", RuntimeWarning, stacklevel=2)
    q_hi = chi2_quantile(n - 1, 0.5 * alpha)
    q_lo = chi2_quantile(n - 1, 1.0 - 0.5 * alpha)
    a = (n - R) / q_lo
    b = (n - R) / q_hi
    return ConfidenceInterval(_kappa_from_a(a), _kappa_from_a(b), 1.0 - alpha, "kappa")


def _gamma_for_kappa(kappa):
    from scipy.optimize import brentq

    if kappa <= 0.0:
        return 0.0
    hi = max(1.0, kappa / 2.0)
    while approx1_kappa(hi) < kappa:
        hi *= 2.0
    return brentq(lambda g: approx1_kappa(g) - kappa, 0.0, hi, xtol=1e-13, rtol=1e-14)


def gamma_ci(interval, mode="exact"):
    """Carry a ``kappa`` interval to ``gamma``.

    ``mode="div4"`` divides both ends by four (the large-concentration
    relation); ``mode="exact"`` solves ``approx1_kappa(gamma) = kappa`` at each end.
    """
    if interval.target != "kappa":
        raise DomainError("gamma_ci needs a kappa interval")
    if mode == "div4":
        lo, hi = interval.lower / 4.0, interval.upper / 4.0
    elif mode == "exact":
        lo, hi = _gamma_for_kappa(interval.lower), _gamma_for_kappa(interval.upper)
    else:
        raise DomainError(f"unknown mode {mode!r}")
    return ConfidenceInterval(lo, hi, interval.level, "gamma")


def csm_ci(interval):
    """Carry a ``gamma`` interval to the CSM scale, ``rho(gamma)**2``."""
    if interval.target != "gamma":
        raise DomainError("csm_ci needs a gamma interval")
    return ConfidenceInterval(pin_rho(interval.lower) ** 2, pin_rho(interval.upper) ** 2, interval.level, "csm")


def csm_interval(sample, alpha=0.05, mode="exact"):
    """CSM interval for a sample: ``kappa_ci`` then ``gamma_ci`` then ``csm_ci``."""
    summ = sample if isinstance(sample, CircularSummary) else circ_summary(sample)
    return csm_ci(gamma_ci(kappa_ci(summ.n * summ.R_bar, summ.n, alpha), mode))
