import math

import numpy as np
import pytest
import scipy.special as sc
import scipy.stats as st
from hypothesis import given, strategies as hst

from pinsync.errors import ConvergenceError, DomainError
from pinsync.special import (QuadratureSpec, bessel_i, bessel_j0, chi2_quantile, integrate, inv_A, j0_zeros,
                             mean_resultant_A, mean_resultant_A_prime, normal_pdf_cdf, wynn_epsilon)


def test_normal_pdf_cdf():
    p, c = normal_pdf_cdf(0.0)
    assert p == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)
    assert c == 0.5
    assert normal_pdf_cdf(1.96)[1] == pytest.approx(0.9750021048517795, abs=1e-12)


@given(hst.floats(-30, 30))
def test_normal_reflection(x):
    assert normal_pdf_cdf(x)[1] + normal_pdf_cdf(-x)[1] == pytest.approx(1.0, abs=1e-15)


def test_bessel_known_values():
    assert bessel_i(0, 0.0) == 1.0
    assert bessel_i(1, 2.0) == pytest.approx(1.5906368546373291, rel=1e-14)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 1.5, 2.0, 3.5, 10.0])
def test_bessel_against_scipy(nu):
    z = np.geomspace(1e-4, 700, 400)
    np.testing.assert_allclose(bessel_i(nu, z), sc.iv(nu, z), rtol=1e-12)
    z = np.geomspace(1e-4, 1e5, 400)
    np.testing.assert_allclose(bessel_i(nu, z, scaled=True), sc.ive(nu, z), rtol=1e-12)


def test_half_order_identities():
    z = np.linspace(0.01, 30, 500)
    f = np.sqrt(np.pi * z / 2)
    np.testing.assert_allclose(bessel_i(0.5, z) * f, np.sinh(z), rtol=1e-10)
    np.testing.assert_allclose(bessel_i(-0.5, z) * f, np.cosh(z), rtol=1e-10)


@given(hst.floats(0.0, 5.0), hst.floats(0.0, 700.0))
def test_scaled_consistency(nu, z):
    u = bessel_i(nu, z)
    s = bessel_i(nu, z, scaled=True)
    if 0.0 < u < 1e300:
        assert s * math.exp(z) == pytest.approx(u, rel=1e-12)


def test_bessel_domain():
    with pytest.raises(DomainError):
        bessel_i(0, -1.0)
    with pytest.raises(DomainError):
        bessel_i(-1.0, 1.0)


def test_j0():
    assert bessel_j0(0.0) == 1.0
    assert bessel_j0(5.0) == pytest.approx(-0.17759677131433830, abs=1e-14)
    assert abs(bessel_j0(2.404825557695773)) < 1e-14
    np.testing.assert_allclose(j0_zeros(5), sc.jn_zeros(0, 5), rtol=1e-14)


def test_mean_resultant_A():
    assert mean_resultant_A(0.0) == 0.0
    assert mean_resultant_A(2.0) == pytest.approx(0.698, abs=5e-4)
    assert mean_resultant_A(2.7) == pytest.approx(0.785, abs=5e-4)
    k = np.geomspace(1e-3, 1e4, 200)
    np.testing.assert_allclose(mean_resultant_A(k), sc.ive(1, k) / sc.ive(0, k), rtol=1e-13)
    assert np.all(np.diff(mean_resultant_A(k)) > 0)


def test_mean_resultant_A_prime_finite_difference():
    for k in (0.1, 1.0, 5.0, 40.0):
        h = 1e-5 * max(k, 1.0)
        fd = (mean_resultant_A(k + h) - mean_resultant_A(k - h)) / (2 * h)
        assert mean_resultant_A_prime(k) == pytest.approx(fd, rel=1e-7)


def test_inv_A_examples():
    assert inv_A(0.0) == 0.0
    assert inv_A(0.698) == pytest.approx(2.0, abs=0.01)
    for r in (0.1, 0.5, 0.9):
        assert abs(mean_resultant_A(inv_A(r)) - r) < 1e-10
    with pytest.raises(DomainError):
        inv_A(1.0)


@given(hst.floats(0.0, 50.0))
def test_inv_A_round_trip(k):
    assert inv_A(mean_resultant_A(k)) == pytest.approx(k, abs=1e-10 * max(1.0, k))


def test_chi2_quantile_examples():
    assert chi2_quantile(2, 0.05) == pytest.approx(-2 * math.log(0.05), rel=1e-10)
    assert chi2_quantile(11, 0.025) == pytest.approx(21.920, abs=5e-4)
    assert chi2_quantile(11, 0.975) == pytest.approx(3.816, abs=5e-4)


@given(hst.integers(1, 300), hst.floats(1e-6, 1 - 1e-6))
def test_chi2_quantile_round_trip(df, p):
    x = chi2_quantile(df, p)
    assert st.chi2.sf(x, df) == pytest.approx(p, abs=1e-8)
    assert chi2_quantile(df, p, upper=False) == pytest.approx(st.chi2.ppf(p, df), rel=1e-8)


def test_integrate_basic():
    assert integrate(lambda t: np.full_like(t, 1 / (2 * np.pi)), 0.0, 2 * np.pi) == pytest.approx(1.0, abs=1e-14)
    assert integrate(np.exp, 0.0, 1.0) == pytest.approx(math.e - 1, rel=1e-13)
    assert integrate(lambda t: np.exp(-t), 0.0, math.inf) == pytest.approx(1.0, rel=1e-10)
    assert integrate(lambda t: 1 / np.sqrt(t), 0.0, 1.0, QuadratureSpec(1e-9, 1e-9, 5000)) == pytest.approx(2.0, rel=1e-8)


def test_integrate_oscillatory_bessel():
    # int_0^inf R u J0(R u) J0(u)^2 du = 2 / (pi sqrt(4 - R^2))
    zeros = lambda k: sc.jn_zeros(0, k + 1)[-1]
    for R in (0.5, 1.0, 1.5):
        val = integrate(lambda u: R * u * sc.j0(R * u) * sc.j0(u) ** 2, 0.0, math.inf, zeros=lambda k: sc.jn_zeros(0, k + 1)[-1] / R)
        assert val == pytest.approx(2 / (math.pi * math.sqrt(4 - R * R)), abs=1e-8)


def test_integrate_convergence_error():
    spec = QuadratureSpec(1e-15, 1e-15, 3)
    with pytest.raises(ConvergenceError) as info:
        integrate(lambda t: np.sin(50 * t) / np.sqrt(t), 0.0, 1.0, spec)
    assert math.isfinite(info.value.estimate)


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(abs_tol=-1.0)
    with pytest.raises(DomainError):
        QuadratureSpec(acceleration="magic")


def test_wynn_log2():
    s = np.cumsum([(-1) ** k / (k + 1) for k in range(20)])
    est, err = wynn_epsilon(s)
    assert est == pytest.approx(math.log(2), abs=1e-12)
    assert err < 1e-8
