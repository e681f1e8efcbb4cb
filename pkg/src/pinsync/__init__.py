"""Projected isotropic normal phase model and CSM inference."""
__version__ = "0.1.0"

from .errors import ConvergenceError, DomainError, ParseError, PinsyncError, UnsupportedCaseError
from .pin import (AngleSample, PinParams, pin_cos_moment, pin_logpdf, pin_mode_antimode, pin_pdf,
                  pin_rho, pin_rho_prime, pin_sample, wrap_angle)
from .vm_approx import VonMisesParams, approx1_kappa, approx2_kappa, kl_pin_vm, kappa_gap_peak, vm_pdf
from .resultant import (ResultantDensitySpec, csm_cdf, csm_pdf, monte_carlo_csm, n2_resultant_pdf,
                        rbar_asymptotics, resultant_pdf, stephens_transform, uniform_resultant_pdf,
                        vm_resultant_pdf)
from .estimate import (CircularSummary, EstimationResult, circ_summary, csm_mle, kappa_bias_correct,
                       mom_gamma_approx1, mom_gamma_approx2, pin_loglik, pin_mle)
from .infer import (ConfidenceInterval, TestResult, csm_ci, csm_interval, gamma_ci, kappa_ci,
                    lrt_uniformity, rayleigh_test, two_sample_F, two_sample_lrt)
from .eeg import (CsmSpectrum, ImpulseTrainSpec, SegmentSet, TimeSeries, csm_spectrum, harmonic_report,
                  load_trace, segment, segment_phases, synth_impulse_eeg)
