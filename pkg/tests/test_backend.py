import os
import subprocess
import sys

import numpy as np
import pytest

from pinsync import _backend

pytestmark = pytest.mark.skipif("compiled" not in _backend.available(), reason="compiled kernels not built")

py = _backend.get("python")


@pytest.fixture(scope="module")
def cy():
    return _backend.get("compiled")


def test_active_backend_is_compiled_by_default():
    if os.environ.get("PINSYNC_BACKEND", "").lower() != "python":
        assert _backend.name == "compiled"


def test_forced_python_backend():
    code = "from pinsync import _backend; print(_backend.name)"
    env = dict(os.environ, PINSYNC_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.get("fortran")


@pytest.mark.parametrize("nu", [-0.5, 0.0, 0.5, 1.0, 2.5, 7.0])
def test_bessel_equivalence(cy, nu):
    z = np.concatenate([[0.0, 1e-12, 1e-3], np.geomspace(0.01, 500, 300)])
    if nu == -0.5:
        z = z[1:]
    np.testing.assert_allclose(cy.bessel_i_scaled(nu, z), py.bessel_i_scaled(nu, z), rtol=1e-13, atol=1e-300)


@pytest.mark.parametrize("gamma", [1e-6, 0.1, 1.0, 41.24, 500.0])
def test_pin_kernels_equivalence(cy, gamma):
    d = np.linspace(-np.pi, np.pi, 2001)
    np.testing.assert_allclose(cy.pin_logpdf(d, gamma), py.pin_logpdf(d, gamma), rtol=1e-12, atol=1e-12)
    a = cy.pin_loglik_terms(d, gamma)
    b = py.pin_loglik_terms(d, gamma)
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-9)


def test_panel_sums_equivalence(cy):
    from pinsync.resultant import _panel_nodes

    u, _, wt, starts = _panel_nodes(5, 8.0, 60)
    R = np.linspace(0.3, 4.7, 17)
    np.testing.assert_allclose(cy.weighted_j0_panel_sums(R, u, wt, starts),
                               py.weighted_j0_panel_sums(R, u, wt, starts), rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 8, 512])
def test_fft_equivalence_and_oracle(cy, n):
    x = np.random.default_rng(n).standard_normal((3, n))
    ref = np.fft.fft(x, axis=-1)
    np.testing.assert_allclose(cy.fft_radix2(x), ref, atol=1e-10)
    np.testing.assert_allclose(py.fft_radix2(x), ref, atol=1e-10)


def test_fft_rejects_non_power_of_two(cy):
    for k in (cy, py):
        with pytest.raises(ValueError):
            k.fft_radix2(np.zeros(6))
