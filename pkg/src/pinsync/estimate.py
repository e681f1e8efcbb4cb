"""Summary statistics and estimation of the PIN concentration.

The hybrid estimate fixes the mean direction at the sample mean direction
and maximizes the likelihood over ``gamma`` alone; the joint estimate then
refines ``(mu, gamma)`` by coordinate ascent. Moment estimators invert the
population resultant ``rho(gamma)`` (Approx 1) or the von Mises resultant of
the score-matching concentration (Approx 2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import _backend
from .errors import ConvergenceError, DomainError
from .pin import AngleSample, pin_rho, pin_rho_prime, wrap_angle
from .resultant import rbar_asymptotics
from .special import mean_resultant_A
from .vm_approx import approx1_kappa, approx2_kappa

__all__ = [
    "CircularSummary",
    "EstimationResult",
    "circ_summary",
    "pin_loglik",
    "pin_score",
    "pin_mle",
    "mom_gamma_approx1",
    "mom_gamma_approx2",
    "csm_mle",
    "kappa_bias_correct",
    "gamma_mom_variance",
    "gamma_profile",
    "count_local_maxima",
]

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class CircularSummary:
    """Sample trigonometric means.

    ``theta_bar`` is ``nan`` (and ``theta_defined`` false) when ``R_bar == 0``.
    """

    C_bar: float
    S_bar: float
    R_bar: float
    theta_bar: float
    csm: float
    n: int
    theta_defined: bool = True


@dataclass(frozen=True)
class EstimationResult:
    """Point estimate of ``(mu, gamma)`` with its log-likelihood.

    ``diagnostics`` records iteration counts, the final bracket and whether the
    tolerance was met; ``flag`` is ``"ok"``, ``"uniform"`` (``R_bar = 0``, so
    ``gamma_hat = 0``) or ``"degenerate"`` (``R_bar = 1``, ``gamma_hat = inf``).
    """

    mu_hat: float
    gamma_hat: float
    method: str
    loglik: float
    diagnostics: dict = field(default_factory=dict)
    flag: str = "ok"


def _angles(sample):
    if isinstance(sample, AngleSample):
        return sample.angles
    return AngleSample(sample).angles


def circ_summary(sample):
    """Mean cosine, mean sine, mean resultant length, mean direction and CSM."""
    theta = _angles(sample)
    c = float(np.mean(np.cos(theta)))
    s = float(np.mean(np.sin(theta)))
    r = math.hypot(c, s)
    if r <= 1e-15:
        return CircularSummary(c, s, 0.0, math.nan, 0.0, theta.size, False)
    r = min(r, 1.0)
    return CircularSummary(c, s, r, math.atan2(s, c), r * r, theta.size, True)


def pin_loglik(sample, mu, gamma):
    """PIN log-likelihood ``sum log f(theta_i; mu, gamma)``."""
    theta = _angles(sample)
    gamma = float(gamma)
    if not gamma >= 0.0:
        raise DomainError("gamma must be >= 0")
    if gamma == 0.0:
        return -theta.size * _LOG_2PI
    return float(np.sum(_backend.kernels.pin_logpdf(theta - mu, gamma)))


def pin_score(sample, mu, gamma):
    """``(loglik, d loglik / d gamma, d loglik / d mu)`` at ``gamma > 0``."""
    theta = _angles(sample)
    if not gamma > 0.0:
        raise DomainError("the score needs gamma > 0")
    return _backend.kernels.pin_loglik_terms(theta - mu, float(gamma))


def _gamma_root(d, r_bar, xtol=1e-12):
    """Maximizer of the log-likelihood in gamma for centred angles ``d``."""
    kern = _backend.kernels

    def score(g):
        return kern.pin_loglik_terms(d, g)[1]

    hi = max(1.0, 2.0 * mom_gamma_approx1(min(r_bar, 1.0 - 1e-12)))
    doublings = 0
    while score(hi) > 0.0:
        hi *= 2.0
        doublings += 1
        if hi > 1e12:
            return math.inf, {"bracket": (None, hi), "doublings": doublings}
    lo = min(1e-8, 0.5 * hi)
    while score(lo) < 0.0:
        lo *= 1e-3
        if lo < 1e-300:
            return 0.0, {"bracket": (0.0, hi), "doublings": doublings}
    root, res = brentq(score, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, full_output=True)
    if not res.converged:
        raise ConvergenceError("gamma score root not found", root, hi - lo)
    return root, {"bracket": (lo, hi), "doublings": doublings, "iterations": res.iterations}


def _mu_step(theta, mu, gamma):
    kern = _backend.kernels
    res = minimize_scalar(lambda m: -float(np.sum(kern.pin_logpdf(theta - m, gamma))),
                          bounds=(mu - 0.5 * math.pi, mu + 0.5 * math.pi), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x)


def pin_mle(sample, mode="hybrid", max_sweeps=200, tol=1e-10):
    """Maximum likelihood estimate of ``(mu, gamma)``.

    Parameters
    ----------
    sample : AngleSample or array_like
    mode : {"hybrid", "joint"}
        ``hybrid`` fixes ``mu`` at the sample mean direction. ``joint``
        alternates 1-D maximizations over ``mu`` and ``gamma`` starting from
        the hybrid estimate, for at most ``max_sweeps`` sweeps.

    Raises
    ------
    ConvergenceError
        If the joint ascent has not settled after ``max_sweeps`` sweeps.
    """
    if mode not in ("hybrid", "joint"):
        raise DomainError(f"unknown mode {mode!r}")
    theta = _angles(sample)
    if theta.size < 2:
        raise DomainError("pin_mle needs at least two angles")
    summ = circ_summary(theta)
    if not summ.theta_defined:
        return EstimationResult(0.0, 0.0, mode, -theta.size * _LOG_2PI,
                                {"iterations": 0, "converged": True}, "uniform")
    mu = summ.theta_bar
    d = theta - mu
    if np.ptp(np.cos(d)) == 0.0 and np.all(np.abs(np.sin(d)) < 1e-15):
        return EstimationResult(mu, math.inf, mode, math.inf, {"iterations": 0, "converged": True}, "degenerate")
    gamma, diag = _gamma_root(d, summ.R_bar)
    if math.isinf(gamma):
        return EstimationResult(mu, math.inf, mode, math.inf, dict(diag, converged=True), "degenerate")
    loglik = pin_loglik(theta, mu, gamma)
    diag = dict(diag, converged=True, sweeps=0)
    if mode == "hybrid":
        return EstimationResult(wrap_angle(mu), gamma, "hybrid", loglik, diag)
    for sweep in range(1, max_sweeps + 1):
        new_mu = _mu_step(theta, mu, gamma)
        new_gamma, gdiag = _gamma_root(theta - new_mu, summ.R_bar)
        new_ll = pin_loglik(theta, new_mu, new_gamma)
        step = max(abs(new_mu - mu), abs(new_gamma - gamma) / max(1.0, gamma))
        if new_ll < loglik:
            break
        mu, gamma, loglik = new_mu, new_gamma, new_ll
        if step < tol:
            diag.update(gdiag, sweeps=sweep)
            return EstimationResult(wrap_angle(mu), gamma, "mle", loglik, diag)
    else:
        raise ConvergenceError("joint maximization did not settle", gamma, step)
    diag.update(sweeps=sweep)
    return EstimationResult(wrap_angle(mu), gamma, "mle", loglik, diag)


def _check_rbar(R_bar):
    R_bar = float(R_bar)
    if not (0.0 <= R_bar < 1.0):
        raise DomainError(f"R_bar must lie in [0, 1), got {R_bar}")
    return R_bar


def _monotone_root(fun, target, guess):
    hi = max(1.0, 2.0 * guess)
    while fun(hi) < target:
        hi *= 2.0
        if hi > 1e15:
            raise ConvergenceError("no bracket for the moment equation", hi)
    return brentq(lambda g: fun(g) - target, 0.0, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def mom_gamma_approx1(R_bar):
    """Moment estimate solving ``rho(gamma) = R_bar``.

    Behaves like ``2 R_bar**2 / pi`` for small ``R_bar`` and like
    ``1 / (8 (1 - R_bar))`` near one.
    """
    R_bar = _check_rbar(R_bar)
    if R_bar == 0.0:
        return 0.0
    guess = 1.0 / (8.0 * (1.0 - R_bar)) if R_bar > 0.5 else 2.0 * R_bar**2 / math.pi
    return _monotone_root(pin_rho, R_bar, guess)


def mom_gamma_approx2(R_bar):
    """Moment estimate solving ``A(approx2_kappa(gamma)) = R_bar``."""
    R_bar = _check_rbar(R_bar)
    if R_bar == 0.0:
        return 0.0
    guess = 1.0 / (8.0 * (1.0 - R_bar)) if R_bar > 0.5 else 2.0 * R_bar**2 / math.pi
    return _monotone_root(lambda g: mean_resultant_A(approx2_kappa(g)), R_bar, guess)


def csm_mle(gamma_hat):
    """Plug-in CSM estimate ``rho(gamma_hat)**2``."""
    gamma_hat = float(gamma_hat)
    if math.isinf(gamma_hat):
        return 1.0
    return pin_rho(gamma_hat) ** 2


def kappa_bias_correct(kappa_hat, n):
    """Small-sample correction of a von Mises concentration estimate."""
    kappa_hat = float(kappa_hat)
    n = int(n)
    if n < 2:
        raise DomainError("n must be >= 2")
    if kappa_hat < 0.0:
        raise DomainError("kappa_hat must be >= 0")
    if kappa_hat < 2.0:
        if kappa_hat == 0.0:
            return 0.0
        return max(kappa_hat - 2.0 / (n * kappa_hat), 0.0)
    return (n - 1) ** 3 * kappa_hat / (n**3 + n)


def gamma_mom_variance(gamma, n, regime="large_n"):
    """Delta-method variance of the Approx 1 moment estimate of ``gamma``.

    ``var(gamma_hat) = var(R_bar) / (d rho / d gamma)**2`` where ``var(R_bar)`` is

    * ``large_kappa``: ``1 / (2 n kappa**2)``;
    * ``large_n``: ``(1 - A(kappa)**2 - A(kappa) / kappa) / n``;
    * ``pin``: the PIN value ``(1 + alpha2 - 2 alpha**2) / (2 n)``,

    with ``kappa = approx1_kappa(gamma)`` in the von Mises regimes.
    """
    gamma = float(gamma)
    n = int(n)
    if not gamma > 0.0:
        raise DomainError("gamma must be > 0")
    if regime == "pin":
        var_r = rbar_asymptotics(gamma, n).var_Rbar
    else:
        kappa = approx1_kappa(gamma)
        if regime == "large_kappa":
            var_r = 1.0 / (2.0 * n * kappa * kappa)
        elif regime == "large_n":
            a = mean_resultant_A(kappa)
            var_r = (1.0 - a * a - a / kappa) / n
        else:
            raise DomainError(f"unknown regime {regime!r}")
    return var_r / pin_rho_prime(gamma) ** 2


def gamma_profile(samples, gammas):
    """Hybrid log-likelihood ``l(theta_bar, gamma)`` over a grid of ``gamma``.

    ``samples`` is one sample or a 2-D array with one sample per row; the
    result has shape ``(rows, len(gammas))`` (1-D for a single sample).
    """
    theta = np.asarray(samples, dtype=float)
    single = theta.ndim == 1
    theta = np.atleast_2d(theta)
    gammas = np.asarray(gammas, dtype=float).reshape(-1)
    if np.any(~(gammas >= 0.0)):
        raise DomainError("gamma grid must be >= 0")
    mu = np.arctan2(np.sin(theta).mean(axis=1), np.cos(theta).mean(axis=1))
    d = theta - mu[:, None]
    kern = _backend.kernels
    out = np.empty((theta.shape[0], gammas.size))
    for k, g in enumerate(gammas):
        if g == 0.0:
            out[:, k] = -theta.shape[1] * _LOG_2PI
        else:
            out[:, k] = np.asarray(kern.pin_logpdf(d, float(g))).sum(axis=1)
    return out[0] if single else out


def count_local_maxima(values):
    """Number of strict local maxima along the last axis, endpoints included."""
    v = np.atleast_2d(np.asarray(values, dtype=float))
    inner = (v[:, 1:-1] > v[:, :-2]) & (v[:, 1:-1] > v[:, 2:])
    count = inner.sum(axis=1) + (v[:, 0] > v[:, 1]) + (v[:, -1] > v[:, -2])
    return count[0] if np.ndim(values) == 1 else count
