"""Von Mises approximations to the PIN distribution.

Approx 1 matches the first trigonometric moment, ``A(kappa) = rho(gamma)``.
Approx 2 matches scores and has the closed form
``kappa = gamma sqrt(2 pi gamma) (I0(gamma) + I1(gamma)) / sinh(gamma)``.
Both behave like ``sqrt(2 pi gamma)`` for small ``gamma`` and like
``4 gamma`` for large ``gamma``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError
from .pin import PinParams, pin_logpdf, pin_rho, wrap_angle
from .special import QuadratureSpec, bessel_i, integrate, inv_A

__all__ = [
    "VonMisesParams",
    "vm_pdf",
    "vm_logpdf",
    "approx1_kappa",
    "approx2_kappa",
    "kl_pin_vm",
    "kappa_gap_peak",
]

KL_SPEC = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-9, max_subdivisions=500, acceleration="none")


@dataclass(frozen=True)
class VonMisesParams:
    """Mean direction ``mu`` and concentration ``kappa >= 0``."""

    mu: float = 0.0
    kappa: float = 0.0

    def __post_init__(self):
        kappa = float(self.kappa)
        if not (kappa >= 0.0) or math.isinf(kappa):
            raise DomainError(f"kappa must be finite and >= 0, got {kappa}")
        object.__setattr__(self, "mu", wrap_angle(float(self.mu)))
        object.__setattr__(self, "kappa", kappa)


def vm_logpdf(theta, params):
    """Log of ``exp(kappa cos(theta - mu)) / (2 pi I0(kappa))``."""
    k = params.kappa
    d = np.asarray(theta, dtype=float) - params.mu
    log_i0_scaled = math.log(bessel_i(0, k, scaled=True))
    out = k * (np.cos(d) - 1.0) - math.log(2.0 * math.pi) - log_i0_scaled
    return out if np.ndim(theta) else float(out)


def vm_pdf(theta, params):
    """Von Mises density, computed in scaled form so large ``kappa`` is safe."""
    out = np.exp(vm_logpdf(theta, params))
    return out if np.ndim(theta) else float(out)


def _gamma_arg(gamma):
    gamma = float(gamma)
    if not (gamma >= 0.0) or math.isinf(gamma):
        raise DomainError(f"gamma must be finite and >= 0, got {gamma}")
    return gamma


def approx1_kappa(gamma):
    """Moment-matching concentration ``inv_A(rho(gamma))``."""
    gamma = _gamma_arg(gamma)
    if gamma == 0.0:
        return 0.0
    return inv_A(pin_rho(gamma))


def approx2_kappa(gamma):
    """Score-matching concentration.

    The ratio is formed from ``exp(-gamma) (I0 + I1)`` over
    ``exp(-gamma) sinh(gamma) = -expm1(-2 gamma) / 2``; at ``gamma = 0``
    the continuous extension 0 is returned.
    """
    gamma = _gamma_arg(gamma)
    if gamma == 0.0:
        return 0.0
    num = bessel_i(0, gamma, scaled=True) + bessel_i(1, gamma, scaled=True)
    den = -0.5 * math.expm1(-2.0 * gamma)
    return gamma * math.sqrt(2.0 * math.pi * gamma) * num / den


def kl_pin_vm(gamma, kappa, spec=KL_SPEC):
    """Kullback-Leibler divergence ``KL(PIN(0, gamma) || vM(0, kappa))`` by quadrature."""
    gamma = _gamma_arg(gamma)
    if gamma == 0.0:
        raise DomainError("kl_pin_vm needs gamma > 0")
    pin = PinParams(0.0, gamma)
    vm = VonMisesParams(0.0, kappa)

    def integrand(t):
        lf = pin_logpdf(t, pin)
        return np.exp(lf) * (lf - vm_logpdf(t, vm))

    # symmetric about zero; integrate one half
    return max(0.0, 2.0 * integrate(integrand, 0.0, math.pi, spec))


def kappa_gap_peak(lo=0.05, hi=5.0):
    """Location and size of the maximum of ``approx2_kappa - approx1_kappa`` on ``[lo, hi]``.

    Returns
    -------
    (gamma_at_max, max_gap) : tuple of float
    """
    res = minimize_scalar(lambda g: -(approx2_kappa(g) - approx1_kappa(g)), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-8})
    return float(res.x), float(-res.fun)
