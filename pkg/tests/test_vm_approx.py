import math

import numpy as np
import pytest
from scipy import integrate as sint
from scipy.special import i0

from pinsync.errors import DomainError
from pinsync.vm_approx import (VonMisesParams, approx1_kappa, approx2_kappa, kappa_gap_peak, kl_pin_vm, vm_pdf)

TABLE3 = [(0.05, 0.5686, 0.5746), (0.25, 1.3513, 1.4161), (0.50, 2.0786, 2.2473), (0.75, 2.7936, 3.0642),
          (1.00, 3.5628, 3.9059), (2.00, 7.2644, 7.5655), (2.50, 9.2872, 9.5093), (3.75, 14.3748, 14.4765),
          (5.00, 19.4204, 19.4790)]


def test_vm_pdf():
    assert vm_pdf(1.0, VonMisesParams(0.0, 0.0)) == pytest.approx(1 / (2 * math.pi), rel=1e-15)
    assert vm_pdf(0.5, VonMisesParams(0.5, 2.0)) == pytest.approx(math.exp(2) / (2 * math.pi * i0(2)), rel=1e-13)
    for k in (0.5, 2.0, 10.0, 800.0):
        val = sint.quad(lambda t: vm_pdf(t, VonMisesParams(0.0, k)), -math.pi, math.pi, points=[0.0], epsabs=1e-13, limit=200)[0]
        assert val == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(DomainError):
        VonMisesParams(0.0, -1.0)


@pytest.mark.parametrize("gamma,k1,k2", TABLE3)
def test_table3(gamma, k1, k2):
    assert approx1_kappa(gamma) == pytest.approx(k1, abs=5e-4)
    assert approx2_kappa(gamma) == pytest.approx(k2, abs=5e-4)


def test_limits():
    for f in (approx1_kappa, approx2_kappa):
        assert f(0.0) == 0.0
        assert f(1e-4) / math.sqrt(2 * math.pi * 1e-4) == pytest.approx(1.0, rel=0.01)
        assert f(50.0) / 200.0 == pytest.approx(1.0, rel=0.01)


def test_ordering_and_peak():
    g = np.linspace(0.05, 5, 200)
    gap = np.array([approx2_kappa(x) - approx1_kappa(x) for x in g])
    assert np.all(gap >= 0)
    loc, size = kappa_gap_peak()
    assert size == pytest.approx(0.37, abs=0.05)
    assert size == pytest.approx(gap.max(), abs=1e-3)
    # the maximizer sits near gamma = 1.33 (see the acceptance suite for the quoted location)
    assert 1.0 < loc < 1.7


def test_kl():
    for g in (0.25, 0.75, 2.5):
        assert kl_pin_vm(g, approx1_kappa(g)) >= 0
    k1 = kl_pin_vm(0.75, approx1_kappa(0.75))
    k2 = kl_pin_vm(0.75, approx2_kappa(0.75))
    assert k1 <= k2
    assert abs(k1 - k2) == pytest.approx(0.003, abs=0.002)
    for g in (1e-3, 5.0, 8.0):
        assert abs(kl_pin_vm(g, approx1_kappa(g)) - kl_pin_vm(g, approx2_kappa(g))) < 1e-3
    with pytest.raises(DomainError):
        kl_pin_vm(0.0, 1.0)


def test_kl_against_scipy_quad():
    from pinsync.pin import PinParams, pin_pdf

    g, k = 1.3, 4.0
    f = lambda t: pin_pdf(t, PinParams(0, g)) * math.log(pin_pdf(t, PinParams(0, g)) / vm_pdf(t, VonMisesParams(0, k)))
    ref = sint.quad(f, -math.pi, math.pi, epsabs=1e-13, limit=200)[0]
    assert kl_pin_vm(g, k) == pytest.approx(ref, rel=1e-8, abs=1e-12)
