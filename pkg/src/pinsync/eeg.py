"""Phase-synchrony pipeline for evoked responses.

A trace is cut into consecutive, non-overlapping segments whose length is a
power of two. Each segment is transformed with the unnormalized forward DFT

    Y_j = sum_t x_t exp(-2 pi i j t / L)

and the phase at bin ``j`` is ``atan2(Im Y_j, Re Y_j)``. The CSM at a bin is
the squared mean resultant length of the ``n`` segment phases. No window,
detrending or filtering is applied unless asked for (``demean``).

The synthesizer produces an impulse train of period ``T`` (one spike of the
given amplitude at the sample nearest each ``k T``) plus Gaussian noise.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _backend, rng
from .errors import DomainError, ParseError
from .estimate import circ_summary, pin_mle
from .infer import ConfidenceInterval, csm_interval
from .pin import AngleSample

__all__ = [
    "TimeSeries",
    "SegmentSet",
    "CsmSpectrum",
    "HarmonicRow",
    "ImpulseTrainSpec",
    "load_trace",
    "parse_trace",
    "segment",
    "frequency_bin",
    "segment_phases",
    "csm_spectrum",
    "harmonic_report",
    "synth_impulse_eeg",
    "stimulated_gamma",
]

_SPACING_RTOL = 1e-9
_BIN_TOL = 1e-9


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled trace."""

    sample_rate_hz: float
    samples: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        fs = float(self.sample_rate_hz)
        if not (fs > 0.0) or math.isinf(fs):
            raise DomainError("sample_rate_hz must be finite and > 0")
        arr = np.array(self.samples, dtype=float).reshape(-1)
        if arr.size == 0:
            raise DomainError("a trace needs at least one sample")
        if not np.all(np.isfinite(arr)):
            raise DomainError("samples must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "sample_rate_hz", fs)
        object.__setattr__(self, "samples", arr)

    @property
    def duration_s(self):
        return self.samples.size / self.sample_rate_hz


@dataclass(frozen=True)
class SegmentSet:
    """``n`` equal blocks of ``segment_len`` samples, one per row of ``segments``."""

    segments: np.ndarray = field(repr=False)
    segment_len: int
    n: int
    sample_rate_hz: float

    @property
    def resolution_hz(self):
        return self.sample_rate_hz / self.segment_len


@dataclass(frozen=True)
class CsmSpectrum:
    freqs_hz: np.ndarray = field(repr=False)
    csm: np.ndarray = field(repr=False)
    n: int
    crit_alpha: float
    crit_value: float

    def rows(self):
        """``(freq_hz, csm, crit_value)`` tuples."""
        return [(float(f), float(c), self.crit_value) for f, c in zip(self.freqs_hz, self.csm)]

    def to_json_dict(self):
        return {"n": self.n, "alpha": self.crit_alpha, "crit": self.crit_value,
                "bins": [{"f": float(f), "csm": float(c)} for f, c in zip(self.freqs_hz, self.csm)]}


@dataclass(frozen=True)
class HarmonicRow:
    freq_hz: float
    csm: float
    gamma_hat: float
    csm_ci: ConfidenceInterval


@dataclass(frozen=True)
class ImpulseTrainSpec:
    """Impulse train of period ``period_s`` and constant ``amplitude`` plus
    i.i.d. ``N(noise_mean, noise_sd**2)`` noise, sampled at ``sample_rate_hz``."""

    period_s: float = 1.0 / 6.0
    amplitude: float = 1.0
    duration_s: float = 24.0
    noise_mean: float = 0.0
    noise_sd: float = 1.0
    sample_rate_hz: float = 256.0

    def __post_init__(self):
        if not self.period_s > 0.0:
            raise DomainError("period_s must be > 0")
        if not self.duration_s > 0.0:
            raise DomainError("duration_s must be > 0")
        if not self.noise_sd >= 0.0:
            raise DomainError("noise_sd must be >= 0")
        if not self.sample_rate_hz > 0.0:
            raise DomainError("sample_rate_hz must be > 0")


def parse_trace(lines, sample_rate_hz=None, header=False, label=""):
    """Parse CSV text lines into a :class:`TimeSeries`.

    One column holds voltages and needs ``sample_rate_hz``. Two columns hold
    ``time_s, voltage``; the spacing must be uniform and, when a rate is also
    given, must match ``1 / sample_rate_hz``, both to a relative ``1e-9``.
    """
    rows, where = [], []
    ncol = None
    for lineno, row in enumerate(csv.reader(lines), start=1):
        if header and lineno == 1:
            continue
        if not row or all(not cell.strip() for cell in row):
            continue
        if ncol is None:
            ncol = len(row)
            if ncol not in (1, 2):
                raise ParseError(f"expected 1 or 2 columns, found {ncol}", lineno)
        elif len(row) != ncol:
            raise ParseError(f"expected {ncol} columns, found {len(row)}", lineno)
        try:
            vals = [float(cell) for cell in row]
        except ValueError:
            raise ParseError(f"not a number: {','.join(row)!r}", lineno) from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError("non-finite value", lineno)
        rows.append(vals)
        where.append(lineno)
    if not rows:
        raise ParseError("no samples found")
    data = np.asarray(rows)
    if ncol == 1:
        if sample_rate_hz is None:
            raise DomainError("a single-column trace needs sample_rate_hz")
        return TimeSeries(sample_rate_hz, data[:, 0], label)
    t = data[:, 0]
    if t.size < 2:
        if sample_rate_hz is None:
            raise DomainError("cannot infer a sample rate from one timestamp")
        return TimeSeries(sample_rate_hz, data[:, 1], label)
    dt = np.diff(t)
    step = dt[0] if sample_rate_hz is None else 1.0 / sample_rate_hz
    if not step > 0.0:
        raise ParseError("timestamps must increase", where[1])
    bad = np.nonzero(np.abs(dt - step) > _SPACING_RTOL * step)[0]
    if bad.size:
        k = int(bad[0])
        raise ParseError(f"time step {dt[k]!r} does not match {step!r}", where[k + 1])
    if sample_rate_hz is None:
        sample_rate_hz = (t.size - 1) / (t[-1] - t[0])
    return TimeSeries(sample_rate_hz, data[:, 1], label)


def load_trace(path, sample_rate_hz=None, header=False, label=None):
    """Read a trace from a UTF-8 CSV file (see :func:`parse_trace`)."""
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    return parse_trace(io.StringIO(text), sample_rate_hz, header, str(path) if label is None else label)


def _is_pow2(k):
    return k >= 1 and not (k & (k - 1))


def segment(trace, segment_seconds):
    """Split ``trace`` into consecutive blocks of ``segment_seconds``.

    The trailing remainder is dropped with a warning.

    Raises
    ------
    DomainError
        If the block length is not a power-of-two sample count, or fewer than
        two complete blocks fit.
    """
    exact = float(segment_seconds) * trace.sample_rate_hz
    seg_len = int(round(exact))
    if abs(exact - seg_len) > 1e-9 * max(1.0, exact) or not _is_pow2(seg_len):
        raise DomainError(f"segment length {exact:g} samples is not a power of two")
    n = trace.samples.size // seg_len
    if n < 2:
        raise DomainError(f"need at least 2 complete segments, trace holds {n}")
    rest = trace.samples.size - n * seg_len
    if rest:
        warnings.warn(f"dropping {rest} trailing samples ({rest / trace.sample_rate_hz:g} s)", UserWarning, stacklevel=2)
    blocks = trace.samples[: n * seg_len].reshape(n, seg_len).copy()
    blocks.setflags(write=False)
    return SegmentSet(blocks, seg_len, n, trace.sample_rate_hz)


def frequency_bin(segments, freq_hz):
    """Integer DFT bin for ``freq_hz``; errors name the nearest usable frequencies."""
    exact = float(freq_hz) * segments.segment_len / segments.sample_rate_hz
    j = int(round(exact))
    res = segments.resolution_hz
    if abs(exact - j) > _BIN_TOL * max(1.0, abs(exact)):
        lo = math.floor(exact) * res
        raise DomainError(f"{freq_hz} Hz is not on the {res:g} Hz grid; nearest are {lo:g} Hz and {lo + res:g} Hz")
    if not (0 <= j <= segments.segment_len // 2):
        raise DomainError(f"{freq_hz} Hz lies outside [0, Nyquist]")
    return j


def _spectra(segments, demean=False):
    x = np.asarray(segments.segments, dtype=float)
    if demean:
        x = x - x.mean(axis=1, keepdims=True)
    return _backend.kernels.fft_radix2(x)


def segment_phases(segments, freq_hz, demean=False):
    """One phase per segment at ``freq_hz``."""
    j = frequency_bin(segments, freq_hz)
    y = _spectra(segments, demean)[:, j]
    return AngleSample(np.arctan2(y.imag, y.real))


def csm_spectrum(segments, max_freq_hz=None, alpha=0.05, demean=False):
    """CSM at every bin ``1 .. floor(max_freq_hz / resolution)``.

    The critical value is the Rayleigh chi-square one, ``ln(1/alpha) / n``.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError("alpha must lie in (0, 1)")
    nyq = segments.sample_rate_hz / 2.0
    if max_freq_hz is None:
        max_freq_hz = nyq
    if max_freq_hz > nyq * (1.0 + 1e-12):
        raise DomainError(f"max_freq_hz exceeds the Nyquist frequency {nyq:g} Hz")
    jmax = int(math.floor(max_freq_hz / segments.resolution_hz + 1e-9))
    y = _spectra(segments, demean)[:, 1 : jmax + 1]
    theta = np.arctan2(y.imag, y.real)
    csm = np.mean(np.cos(theta), axis=0) ** 2 + np.mean(np.sin(theta), axis=0) ** 2
    csm = np.clip(csm, 0.0, 1.0)
    freqs = np.arange(1, jmax + 1) * segments.resolution_hz
    return CsmSpectrum(freqs, csm, segments.n, float(alpha), math.log(1.0 / alpha) / segments.n)


def harmonic_report(spectrum, segments, harmonics_hz, alpha=0.05, demean=False):
    """Hybrid estimate, CSM and its interval at each requested frequency.

    The interval is ``csm_interval`` (exact mode); a warning is issued for
    bins whose concentration estimate lies below the interval's range of
    validity.
    """
    out = []
    for f in harmonics_hz:
        theta = segment_phases(segments, f, demean)
        summ = circ_summary(theta)
        fit = pin_mle(theta, "hybrid")
        ci = csm_interval(summ, alpha)
        out.append(HarmonicRow(float(f), summ.csm, fit.gamma_hat, ci))
    return out


def _impulse_indices(spec, count):
    k_max = int(math.ceil(spec.duration_s / spec.period_s))
    idx = np.rint(np.arange(k_max + 1) * spec.period_s * spec.sample_rate_hz).astype(np.int64)
    return idx[idx < count]


def synth_impulse_eeg(spec, seed, label="synthetic"):
    """Impulse train plus Gaussian noise; deterministic given ``seed``."""
    count = int(round(spec.duration_s * spec.sample_rate_hz))
    if count < 1:
        raise DomainError("duration shorter than one sample")
    x = np.zeros(count)
    np.add.at(x, _impulse_indices(spec, count), spec.amplitude)
    z, _ = rng.box_muller(rng.stream(seed), count)
    x += spec.noise_mean + spec.noise_sd * z
    return TimeSeries(spec.sample_rate_hz, x, label)


def stimulated_gamma(spec, segment_seconds, freq_hz):
    """PIN concentration the synthesizer implies at a bin.

    With ``D_j`` the DFT of one noise-free segment and ``L`` the segment
    length, the noise DFT has variance ``L sigma**2 / 2`` per component, so
    ``gamma = |D_j|**2 / (2 L sigma**2)``, that is half the bin SNR. Only
    meaningful when the deterministic part repeats from segment to segment.
    """
    if not spec.noise_sd > 0.0:
        raise DomainError("gamma is undefined without noise")
    clean = synth_impulse_eeg(ImpulseTrainSpec(spec.period_s, spec.amplitude, spec.duration_s,
                                               0.0, 0.0, spec.sample_rate_hz), 0)
    seg_len = int(round(segment_seconds * spec.sample_rate_hz))
    block = clean.samples[:seg_len]
    if block.size < seg_len or not _is_pow2(seg_len):
        raise DomainError("segment does not fit the trace or is not a power of two")
    j = float(freq_hz) * seg_len / spec.sample_rate_hz
    if abs(j - round(j)) > _BIN_TOL * max(1.0, j):
        raise DomainError(f"{freq_hz} Hz is not on the DFT grid")
    d = _backend.kernels.fft_radix2(block)[int(round(j))]
    return float(abs(d) ** 2 / (2.0 * seg_len * spec.noise_sd**2))
