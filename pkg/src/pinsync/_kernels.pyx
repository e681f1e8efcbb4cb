# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Same contracts as ``pinsync._pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt, cos, sin, fabs, lgamma, M_PI, M_LN2
from scipy.special.cython_special cimport j0 as _j0, ndtr as _ndtr, erfcx as _erfcx

cnp.import_array()

cdef double _SQRT2 = sqrt(2.0)
cdef double _INV_SQRT_2PI = 1.0 / sqrt(2.0 * M_PI)
cdef double _LOG_SQRT_2PI = 0.5 * log(2.0 * M_PI)
cdef double _MILLS_CUTOFF = -100.0
cdef double _SERIES_LIMIT = 30.0


cdef double _series_scaled(double nu, double z) noexcept nogil:
    cdef double term, total, q
    cdef long m = 0
    if z == 0.0:
        if nu == 0.0:
            return 1.0
        if nu < 0.0:
            return 1.0 / 0.0
        return 0.0
    term = exp(nu * (log(z) - M_LN2) - lgamma(nu + 1.0) - z)
    total = term
    q = 0.25 * z * z
    while True:
        m += 1
        term = term * q / (m * (m + nu))
        total += term
        if not (term > 1e-17 * total or m < 0.5 * z):
            break
        if m > 100000:
            break
    return total


cdef double _hankel_scaled(double nu, double z) noexcept nogil:
    cdef double mu4 = 4.0 * nu * nu
    cdef double term = 1.0, total = 1.0, new
    cdef int k
    for k in range(1, 60):
        new = -term * (mu4 - (2 * k - 1) * (2 * k - 1)) / (8.0 * k * z)
        if fabs(new) >= fabs(term):
            break
        term = new
        total += term
        if not (fabs(term) > 1e-17 * fabs(total)):
            break
    return total / sqrt(2.0 * M_PI * z)


cdef inline double _bessel_i_scaled(double nu, double z) noexcept nogil:
    if z > _SERIES_LIMIT and z > 4.0 * nu * nu:
        return _hankel_scaled(nu, z)
    return _series_scaled(nu, z)


def bessel_i_scaled(double nu, z):
    cdef cnp.ndarray[double, ndim=1] flat = np.ascontiguousarray(z, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t i, n = flat.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    with nogil:
        for i in range(n):
            out[i] = _bessel_i_scaled(nu, flat[i])
    return out.reshape(np.shape(z))


cdef inline void _log_g_and_ratio(double a, double* logg, double* ratio) noexcept nogil:
    cdef double cdf, g, ex, inner, r2, mills
    if a >= 0.0:
        cdf = _ndtr(a)
        g = _INV_SQRT_2PI * exp(-0.5 * a * a) + a * cdf
        logg[0] = log(g)
        ratio[0] = cdf / g
    elif a >= _MILLS_CUTOFF:
        ex = 0.5 * _erfcx(-a / _SQRT2)
        inner = _INV_SQRT_2PI + a * ex
        logg[0] = -0.5 * a * a + log(inner)
        ratio[0] = ex / inner
    else:
        r2 = 1.0 / (a * a)
        inner = _INV_SQRT_2PI * r2 * (1.0 - 3.0 * r2 + 15.0 * r2 * r2 - 105.0 * r2 * r2 * r2)
        mills = -(1.0 / a) * (1.0 - r2 + 3.0 * r2 * r2 - 15.0 * r2 * r2 * r2) * _INV_SQRT_2PI
        logg[0] = -0.5 * a * a + log(inner)
        ratio[0] = mills / inner


def pin_logpdf(d, double gamma):
    cdef cnp.ndarray[double, ndim=1] flat = np.ascontiguousarray(d, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t i, n = flat.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    cdef double delta, a, b, logg, ratio
    if gamma == 0.0:
        out[:] = -2.0 * _LOG_SQRT_2PI
        return out.reshape(np.shape(d))
    delta = 2.0 * sqrt(gamma)
    with nogil:
        for i in range(n):
            a = delta * cos(flat[i])
            b = delta * sin(flat[i])
            _log_g_and_ratio(a, &logg, &ratio)
            out[i] = -0.5 * b * b - _LOG_SQRT_2PI + logg
    return out.reshape(np.shape(d))


def pin_loglik_terms(d, double gamma):
    cdef cnp.ndarray[double, ndim=1] flat = np.ascontiguousarray(d, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t i, n = flat.shape[0]
    cdef double root = sqrt(gamma)
    cdef double c, s, a, b, logg, ratio
    cdef double ll = 0.0, dg = 0.0, dm = 0.0
    with nogil:
        for i in range(n):
            c = cos(flat[i])
            s = sin(flat[i])
            a = 2.0 * root * c
            b = 2.0 * root * s
            _log_g_and_ratio(a, &logg, &ratio)
            ll += -0.5 * b * b - _LOG_SQRT_2PI + logg
            dg += -2.0 * s * s + ratio * c / root
            dm += b * (a + ratio)
    return ll, dg, dm


def weighted_j0_panel_sums(R, u, wt, starts):
    cdef cnp.ndarray[double, ndim=1] Rv = np.ascontiguousarray(R, dtype=np.float64).reshape(-1)
    cdef cnp.ndarray[double, ndim=1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] wv = np.ascontiguousarray(wt, dtype=np.float64)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] sv = np.ascontiguousarray(starts, dtype=np.intp)
    cdef Py_ssize_t nr = Rv.shape[0], npan = sv.shape[0], nu_ = uv.shape[0]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((nr, npan))
    cdef Py_ssize_t i, p, k, k0, k1
    cdef double r, acc
    with nogil:
        for i in range(nr):
            r = Rv[i]
            for p in range(npan):
                k0 = sv[p]
                k1 = sv[p + 1] if p + 1 < npan else nu_
                acc = 0.0
                for k in range(k0, k1):
                    acc += wv[k] * _j0(r * uv[k])
                out[i, p] = acc
    return out


def fft_radix2(x):
    arr = np.array(x, dtype=np.complex128, ndmin=1)
    shape = arr.shape
    cdef Py_ssize_t n = shape[len(shape) - 1]
    if n == 0 or (n & (n - 1)) != 0:
        raise ValueError("length must be a power of two")
    flat = arr.reshape(-1, n)
    cdef double[:, ::1] re = np.ascontiguousarray(flat.real, dtype=np.float64)
    cdef double[:, ::1] im = np.ascontiguousarray(flat.imag, dtype=np.float64)
    cdef Py_ssize_t rows = re.shape[0]
    cdef Py_ssize_t r, i, j, bit, size, half, start, k, lo, hi
    cdef double t, wr, wi, ang, br, bi
    with nogil:
        for r in range(rows):
            j = 0
            for i in range(1, n):
                bit = n >> 1
                while j & bit:
                    j ^= bit
                    bit >>= 1
                j |= bit
                if i < j:
                    t = re[r, i]; re[r, i] = re[r, j]; re[r, j] = t
                    t = im[r, i]; im[r, i] = im[r, j]; im[r, j] = t
            size = 2
            while size <= n:
                half = size // 2
                for k in range(half):
                    ang = -2.0 * M_PI * k / size
                    wr = cos(ang)
                    wi = sin(ang)
                    start = 0
                    while start < n:
                        lo = start + k
                        hi = lo + half
                        br = re[r, hi] * wr - im[r, hi] * wi
                        bi = re[r, hi] * wi + im[r, hi] * wr
                        re[r, hi] = re[r, lo] - br
                        im[r, hi] = im[r, lo] - bi
                        re[r, lo] += br
                        im[r, lo] += bi
                        start += size
                size *= 2
    out = np.asarray(re) + 1j * np.asarray(im)
    return out.reshape(shape)
