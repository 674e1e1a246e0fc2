"""Estimation of large autocovariance matrices of stationary time series.

Banded, tapered and thresholded estimates of the ``T x T`` autocovariance
matrix, linear-process models with closed-form dependence measures, spectral
tools, fast Toeplitz linear algebra and a Monte Carlo harness.
"""

__version__ = "0.1.0"

from .base import AutocovarianceSequence, SymmetricToeplitz
from .estimators import (
    BandThresholdAutocovariance,
    SampleAutocovariance,
    TaperedAutocovariance,
    ThresholdedAutocovariance,
    bias_bound,
    plug_in_matrix,
    sample_acov,
    sample_acov_centered,
    tapered_matrix,
    theoretical_bandwidth,
    theoretical_threshold,
    threshold_after_banding,
    thresholded_matrix,
)
from .linalg import NormConvergenceError, NormResult, norm_of_difference, operator_norm, toeplitz_matvec
from .process import (
    LinearProcessModel,
    SparseLagProcess,
    ar1,
    dependence_profile,
    linear_acov,
    linear_spectral_density,
    ma,
    parse_model,
    simulate,
    sparse_lag_acov,
    white_noise,
    x_process,
    y_process,
    zeta,
)
from .spectral import (
    LagWindowSpectralDensity,
    lag_window_estimate,
    periodogram,
    periodogram_fourier_grid,
    toeplitz_spectral_bounds,
    trig_poly_max,
)
from .tapers import BARTLETT, PARZEN, RECTANGULAR, Taper, get_taper
