"""Complex-amplitude statistics behind fluctuating spectra.

Covers the bivariate normal machinery (sampling and density), normalized
intensities of complex amplitudes, intensity and amplitude
autocorrelation estimators, and the Lorentzian coherence law that links
them in the strongly overlapped regime.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, NormalizationError, ParameterError

MEAN_NORMALIZED = "mean-normalized"
VARIANCE_NORMALIZED = "variance-normalized"
AUTOCORR_MODES = (MEAN_NORMALIZED, VARIANCE_NORMALIZED)

UNIT_MEAN = "unit-mean"
MEAN_TWO = "mean-two"
INTENSITY_CONVENTIONS = (UNIT_MEAN, MEAN_TWO)


@dataclass(frozen=True)
class BivariateParams:
    """Means, standard deviations and correlation of a bivariate normal."""

    mu_x: float = 0.0
    mu_y: float = 0.0
    s_x: float = 1.0
    s_y: float = 1.0
    rho: float = 0.0

    def __post_init__(self):
        if self.s_x <= 0 or self.s_y <= 0:
            raise ParameterError("standard deviations must be positive")
        if not abs(self.rho) < 1:
            raise ParameterError("correlation coefficient must satisfy |rho| < 1")


def bivariate_pdf(x, y, params: BivariateParams):
    """Bivariate normal density at (x, y).

    Normalizing constant is 1 / (2 pi s_x s_y sqrt(1 - rho^2)), the form
    that integrates to one.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = (x - params.mu_x) / params.s_x
    dy = (y - params.mu_y) / params.s_y
    one_minus = 1.0 - params.rho * params.rho
    expo = (dx * dx - 2.0 * params.rho * dx * dy + dy * dy) / (2.0 * one_minus)
    norm = 2.0 * np.pi * params.s_x * params.s_y * np.sqrt(one_minus)
    out = np.exp(-expo) / norm
    if out.ndim == 0:
        return float(out)
    return out


def sample_complex_bivariate(s: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n complex samples x + iy with x, y i.i.d. normal(0, s^2)."""
    if s <= 0:
        raise ParameterError("s must be positive")
    if n < 0:
        raise ParameterError("n must be non-negative")
    x = rng.normal(0.0, s, int(n))
    y = rng.normal(0.0, s, int(n))
    return x + 1j * y


def normalized_intensity(samples, convention: str = UNIT_MEAN) -> np.ndarray:
    """Intensities |z|^2 normalized by their sample mean.

    The default `unit-mean` convention returns w = |z|^2 / <|z|^2>, which
    has mean 1 by construction and is exponentially distributed for
    complex normal amplitudes.  The `mean-two` convention rescales to 2w,
    whose density is exp(-w/2)/2, the chi-squared form with two degrees
    of freedom.
    """
    if convention not in INTENSITY_CONVENTIONS:
        raise ParameterError(f"convention must be one of {INTENSITY_CONVENTIONS}")
    z = np.asarray(samples, dtype=complex)
    if z.size < 2:
        raise ParameterError("need at least two samples")
    inten = z.real * z.real + z.imag * z.imag
    mean = inten.mean()
    if mean == 0.0:
        raise DegenerateInputError("all samples are zero; intensity undefined")
    w = inten / mean
    if convention == MEAN_TWO:
        w = 2.0 * w
    return w


def _series_values(series) -> np.ndarray:
    return np.asarray(getattr(series, "values", series), dtype=float)


def intensity_autocorr(series, lag: int, mode: str = MEAN_NORMALIZED) -> float:
    """Autocorrelation of a real intensity-like series at integer lag.

    The overlapping-window estimator with divisor (N - lag) is used for
    the lag products; the subtracted mean is the full-series mean.  In
    `mean-normalized` mode the result is divided by the squared mean
    (the Ericson convention, where lag 0 gives the normalized variance);
    `variance-normalized` mode divides by the variance instead, which
    also handles mean-zero series.

    Slight bias note: dividing by (N - lag) makes the estimator unbiased
    for the covariance at each lag but not jointly consistent across lags
    the way the divisor-N form is.
    """
    values = _series_values(series)
    n = values.size
    if not 0 <= lag < n:
        raise ParameterError("lag must satisfy 0 <= lag < len(series)")
    if mode not in AUTOCORR_MODES:
        raise ParameterError(f"mode must be one of {AUTOCORR_MODES}")
    mean = values.mean()
    centered = values - mean
    num = float((centered[lag:] * centered[: n - lag]).mean())
    if mode == MEAN_NORMALIZED:
        if mean == 0.0:
            raise NormalizationError(
                "series mean is zero; mean-normalized autocorrelation needs an "
                "intensity-like series (try variance-normalized mode)"
            )
        return num / (mean * mean)
    var = float((centered * centered).mean())
    if var == 0.0:
        raise NormalizationError("series variance is zero")
    return num / var


def amplitude_autocorr(samples, lag: int, mode: str = MEAN_NORMALIZED) -> complex:
    """Autocorrelation of a complex amplitude series at integer lag.

    Numerator is <z(n+lag) z*(n)> - |<z>|^2 with the overlapping-window
    estimator.  `mean-normalized` divides by |<z>|^2; `variance-normalized`
    divides by <|z|^2> - |<z>|^2 (the mean-zero mode, where lag 0 gives
    exactly 1).
    """
    z = np.asarray(samples, dtype=complex)
    n = z.size
    if not 0 <= lag < n:
        raise ParameterError("lag must satisfy 0 <= lag < len(samples)")
    if mode not in AUTOCORR_MODES:
        raise ParameterError(f"mode must be one of {AUTOCORR_MODES}")
    zbar = z.mean()
    mean_sq = zbar.real * zbar.real + zbar.imag * zbar.imag
    num = (z[lag:] * np.conj(z[: n - lag])).mean() - mean_sq
    if mode == MEAN_NORMALIZED:
        if mean_sq == 0.0:
            raise NormalizationError("sample mean is zero; use variance-normalized mode")
        return complex(num / mean_sq)
    denom = float((z * np.conj(z)).mean().real) - mean_sq
    if denom == 0.0:
        raise NormalizationError("samples have zero variance")
    return complex(num / denom)


def lorentzian_autocorr(delta, gamma: float):
    """Lorentzian coherence law gamma^2 / (delta^2 + gamma^2).

    This equals |lorentzian_amplitude(delta, gamma)|^2; the coherence
    width gamma is the half-width at half maximum of the correlation.
    """
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    delta = np.asarray(delta, dtype=float)
    out = gamma * gamma / (delta * delta + gamma * gamma)
    if out.ndim == 0:
        return float(out)
    return out


def lorentzian_amplitude(delta, gamma: float):
    """Amplitude correlation 1 / (1 - i delta/gamma) whose modulus squared
    is the Lorentzian coherence law."""
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    delta = np.asarray(delta, dtype=float)
    out = 1.0 / (1.0 - 1j * (delta / gamma))
    if out.ndim == 0:
        return complex(out)
    return out
