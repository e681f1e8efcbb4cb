import math
import warnings

import numpy as np
import pytest

from conftest import O1, P3
from pinsync.errors import DomainError, UnsupportedCaseError
from pinsync.estimate import circ_summary, pin_loglik, pin_mle
from pinsync.infer import (ConfidenceInterval, _kappa_from_a, csm_ci, csm_interval, gamma_ci, kappa_ci,
                           lrt_uniformity, rayleigh_test, two_sample_F, two_sample_lrt)
from pinsync.pin import draw_pin_angles
from pinsync.rng import stream
from pinsync.vm_approx import approx1_kappa


def test_rayleigh_critical_values():
    s = circ_summary(P3)
    assert rayleigh_test(s, 0.05, "chi2").critical_value == pytest.approx(math.log(20) / 12, rel=1e-14)
    assert rayleigh_test(s, 0.05, "stephens_exact_table").critical_value == pytest.approx(0.494 ** 2, rel=1e-14)
    assert rayleigh_test(s, 0.05, "normal").critical_value == pytest.approx(0.247, abs=5e-4)


def test_rayleigh_decisions_and_p_values():
    s = circ_summary(P3)
    r = rayleigh_test(s, 0.05, "chi2")
    assert r.reject == (s.csm >= r.critical_value)
    assert r.p_value == pytest.approx(math.exp(-12 * s.csm))
    assert rayleigh_test(s, 0.01, "chi2").reject is False
    n = rayleigh_test(s, 0.05, "normal")
    assert n.reject == (n.p_value <= 0.05)


def test_rayleigh_errors():
    s = circ_summary(P3)
    with pytest.raises(UnsupportedCaseError):
        rayleigh_test(s, 0.01, "stephens_exact_table")
    with pytest.raises(DomainError):
        rayleigh_test(s, 1.5)
    with pytest.raises(DomainError):
        rayleigh_test(circ_summary([0.3]), 0.05)
    with pytest.raises(DomainError):
        rayleigh_test(s, 0.05, "exact")


def test_rayleigh_flavors_agree_for_large_n():
    th = draw_pin_angles(stream(31), (2000, 100), 0.0)
    agree = 0
    for x in th:
        s = circ_summary(x)
        agree += rayleigh_test(s, 0.05, "chi2").reject == rayleigh_test(s, 0.05, "normal").reject
    assert agree / 2000 >= 0.99


def test_lrt_uniformity_basic():
    grid = np.arange(12) * 2 * np.pi / 12
    assert lrt_uniformity(grid).statistic == pytest.approx(0.0, abs=1e-9)
    fit = pin_mle(P3, "joint")
    composite = lrt_uniformity(P3)
    simple = lrt_uniformity(P3, mu=fit.mu_hat, gamma=fit.gamma_hat)
    assert simple.statistic == pytest.approx(composite.statistic, rel=1e-12)
    assert composite.df == 2 and "approximate" in composite.note
    with pytest.raises(DomainError):
        lrt_uniformity(P3, mu=0.0)


@pytest.mark.slow
def test_lrt_uniformity_power():
    th = draw_pin_angles(stream(32), (1000, 50), 2.5)
    assert np.mean([lrt_uniformity(x).reject for x in th]) >= 0.99


def test_two_sample_lrt_identical_and_table1():
    assert two_sample_lrt(P3, P3).statistic == pytest.approx(0.0, abs=1e-6)
    r = two_sample_lrt(O1, P3)
    assert r.df == 2 and r.statistic == pytest.approx(43.7, abs=1.0)
    g = two_sample_lrt(O1, P3, null="common_gamma")
    assert g.df == 1 and 0 < g.statistic < r.statistic
    with pytest.raises(DomainError):
        two_sample_lrt(O1, P3, null="other")


@pytest.mark.slow
def test_two_sample_lrt_size():
    a = draw_pin_angles(stream(33), (1000, 50), 1.0)
    b = draw_pin_angles(stream(34), (1000, 50), 1.0)
    rate = np.mean([two_sample_lrt(x, y).reject for x, y in zip(a, b)])
    assert rate == pytest.approx(0.05, abs=0.02)


def test_two_sample_F():
    s = circ_summary(P3)
    assert two_sample_F(s, s).statistic == pytest.approx(1.0)
    assert 90 <= two_sample_F(circ_summary(O1), s).statistic <= 140
    inf = two_sample_F(circ_summary([0.2] * 5), s)
    assert inf.statistic == math.inf and inf.reject and "infinite" in inf.note


def test_two_sample_F_monotone_in_first_rbar():
    s2 = circ_summary(P3)
    stats = []
    for spread in (1.0, 0.6, 0.3, 0.1):
        x = np.linspace(-spread, spread, 12)
        stats.append(two_sample_F(circ_summary(x), s2).statistic)
    assert np.all(np.diff(stats) > 0)


def test_two_sample_F_size():
    gen = np.random.default_rng(35)
    rej = [two_sample_F(circ_summary(gen.vonmises(0, 5, 12)), circ_summary(gen.vonmises(0, 5, 12))).reject
           for _ in range(2000)]
    assert np.mean(rej) == pytest.approx(0.05, abs=0.02)


def test_kappa_ci_shape_and_errors():
    assert _kappa_from_a(0.3) == _kappa_from_a(0.3)
    ci = kappa_ci(11.5, 12)
    assert 0 < ci.lower <= ci.upper and ci.target == "kappa" and ci.level == pytest.approx(0.95)
    with pytest.raises(DomainError):
        kappa_ci(12.0, 12)
    with pytest.warns(RuntimeWarning):
        kappa_ci(6.0, 12)


def test_kappa_ci_width_shrinks_with_n():
    gen = np.random.default_rng(36)
    widths = []
    for n in (12, 50, 200):
        x = gen.vonmises(0.0, 4.0, n)
        s = circ_summary(x)
        ci = kappa_ci(n * s.R_bar, n)
        widths.append(ci.upper - ci.lower)
    assert widths[0] > widths[1] > widths[2]


def test_kappa_ci_coverage_von_mises():
    gen = np.random.default_rng(37)
    k, n = 6.0, 20
    hits = 0
    for x in gen.vonmises(0.0, k, (2000, n)):
        ci = kappa_ci(n * circ_summary(x).R_bar, n)
        hits += ci.lower <= k <= ci.upper
    assert hits / 2000 == pytest.approx(0.95, abs=0.02)


def test_gamma_ci_modes():
    k = ConfidenceInterval(8.0, 12.0, 0.95, "kappa")
    d = gamma_ci(k, "div4")
    assert (d.lower, d.upper) == (2.0, 3.0)
    e = gamma_ci(k, "exact")
    assert approx1_kappa(e.lower) == pytest.approx(8.0, rel=1e-10)
    assert approx1_kappa(e.upper) == pytest.approx(12.0, rel=1e-10)
    # exact inversion sits above kappa / 4 by a nearly constant offset
    for kappa in (30.0, 60.0, 200.0):
        g = gamma_ci(ConfidenceInterval(kappa, kappa, 0.95, "kappa"), "exact").lower
        assert 0 < g / (kappa / 4) - 1 < 0.02
    with pytest.raises(DomainError):
        gamma_ci(d)
    with pytest.raises(DomainError):
        csm_ci(k)


@pytest.mark.xfail(strict=True, reason="gamma is about kappa/4 + 0.18, so the 2% band holds only from kappa near 28")
def test_gamma_ci_exact_close_to_div4_from_kappa_8():
    e = gamma_ci(ConfidenceInterval(8.0, 12.0, 0.95, "kappa"), "exact")
    assert e.lower == pytest.approx(2.0, rel=0.02) and e.upper == pytest.approx(3.0, rel=0.02)


def test_interval_invariants():
    with pytest.raises(DomainError):
        ConfidenceInterval(2.0, 1.0, 0.95, "kappa")
    with pytest.raises(DomainError):
        ConfidenceInterval(1.0, 2.0, 1.0, "kappa")
    with pytest.raises(DomainError):
        ConfidenceInterval(1.0, 2.0, 0.9, "rho")


def test_csm_interval_o1():
    ci = csm_interval(O1)
    assert ci.lower == pytest.approx(0.9810, abs=0.002)
    assert ci.upper == pytest.approx(0.9967, abs=0.002)


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="the von Mises interval is too narrow for PIN data; coverage is about 0.90")
def test_gamma_ci_coverage_pin():
    hits = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for x in draw_pin_angles(stream(38), (2000, 50), 2.5):
            ci = gamma_ci(kappa_ci(50 * circ_summary(x).R_bar, 50), "exact")
            hits += ci.lower <= 2.5 <= ci.upper
    assert hits / 2000 == pytest.approx(0.95, abs=0.02)
