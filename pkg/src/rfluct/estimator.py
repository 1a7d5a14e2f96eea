"""Coherence-width and spacing estimation from observed series.

The coherence width is obtained by fitting the normalized intensity
autocorrelation to the Lorentzian law over a lag window; the mean level
spacing comes from prominent-peak separations.  Their ratio is the
strength function.  The first-window protocol estimates both on an
opening training window and on the remaining session, and reports
whether the coherence width drifted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .errors import FlatSeriesError, ParameterError, ToolkitError
from .fluctuations import MEAN_NORMALIZED, intensity_autocorr
from .series import SpectrumSeries

# Fit residual (RMS of the normalized autocorrelation misfit over the
# coherence region) above which a poor-fit flag is attached; white noise
# lands above 0.2, clean fits below 0.1.
DEFAULT_RESIDUAL_CEILING = 0.15

# Smooth-curve maxima cannot sit closer than about twice the coherence
# width, so a detected spacing below this many widths means the maxima
# are fluctuation bumps rather than resolved levels.
OVERLAP_SPACING_FACTOR = 3.0

# Fraction of the value range a local maximum must protrude to count as a
# peak.  Width fluctuations make the tallest resonances stretch the range,
# so the threshold must stay well below the typical peak height.
DEFAULT_MIN_PROMINENCE = 0.01

# Shortest admissible opening window, in seconds; the longest is half
# the session.
MIN_TRAIN_SECONDS = 1800.0

DEFAULT_DRIFT_THRESHOLD = 0.25

_SCAN_POINTS = 200
_GOLDEN_REL_TOL = 1e-4

VERDICT_STABLE = "stable"
VERDICT_DRIFTED = "drifted"
VERDICT_WITHHELD = "withheld"


@dataclass(frozen=True)
class StrengthEstimate:
    """Fitted coherence width, mean spacing and their ratio for a window.

    ``d_hat`` and ``ratio`` are None when too few peaks were resolvable;
    ``flags`` carries non-fatal diagnostics such as `poor-fit`,
    `overlapped` and `too-few-peaks`.
    """

    gamma_hat: float
    d_hat: float | None
    ratio: float | None
    fit_residual: float
    window: tuple[float, float]
    n_lags_used: int
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.gamma_hat <= 0:
            raise ParameterError("gamma_hat must be positive")
        if self.fit_residual < 0:
            raise ParameterError("fit_residual must be non-negative")
        if (self.d_hat is None) != (self.ratio is None):
            raise ParameterError("ratio must be present exactly when d_hat is")


@dataclass(frozen=True)
class PredictionReport:
    """Opening-window estimate versus the rest of the session."""

    train_estimate: StrengthEstimate | None
    holdout_estimate: StrengthEstimate | None
    relative_drift: float | None
    verdict: str
    threshold: float

    def __post_init__(self):
        if self.verdict not in (VERDICT_STABLE, VERDICT_DRIFTED, VERDICT_WITHHELD):
            raise ParameterError("verdict must be stable, drifted or withheld")


def detrend_keep_mean(values: np.ndarray) -> np.ndarray:
    """Remove the least-squares linear trend but keep the window mean.

    Series of interest ride on drifting baselines (gross structure) that
    would corrupt the autocorrelation; removing only the slope keeps the
    mean-normalized convention usable.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 2:
        return values.copy()
    t = np.arange(n, dtype=float)
    slope, intercept = np.polyfit(t, values, 1)
    return values - (intercept + slope * t) + values.mean()


def _golden_section_min(fn, lo: float, hi: float, rel_tol: float = _GOLDEN_REL_TOL) -> float:
    """Minimize fn over [lo, hi] on a log abscissa, derivative-free."""
    a, b = np.log(lo), np.log(hi)
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(np.exp(c)), fn(np.exp(d))
    while (b - a) > rel_tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(np.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(np.exp(d))
    return float(np.exp(0.5 * (a + b)))


def autocorr_curve(series: SpectrumSeries, max_lag: int | None = None,
                   detrend: bool = True, mode: str = MEAN_NORMALIZED) -> tuple[np.ndarray, np.ndarray]:
    """Normalized autocorrelation at lags 0..max_lag, as fitted.

    Returns (lags in samples, autocorrelation normalized to 1 at lag 0),
    with the same detrending and normalization the width fit uses.
    """
    n = len(series)
    if max_lag is None:
        max_lag = max(4, n // 8)
    max_lag = int(max_lag)
    if max_lag < 1:
        raise ParameterError("max_lag must be at least 1")
    if n < 4 * max_lag:
        raise ParameterError("series must be at least 4 * max_lag samples long")
    values = series.values
    if np.all(values == values[0]):
        raise FlatSeriesError("series is constant")
    if detrend:
        values = detrend_keep_mean(values)
    corr = np.array([intensity_autocorr(values, k, mode=mode) for k in range(max_lag + 1)])
    if corr[0] <= 0.0:
        raise FlatSeriesError("autocorrelation at lag 0 is not positive")
    return np.arange(max_lag + 1, dtype=float), corr / corr[0]


def estimate_coherence_width(series: SpectrumSeries, max_lag: int | None = None,
                             detrend: bool = True, mode: str = MEAN_NORMALIZED,
                             residual_ceiling: float = DEFAULT_RESIDUAL_CEILING) -> StrengthEstimate:
    """Fit the Lorentzian coherence law to the series autocorrelation.

    Computes the autocorrelation at lags 0..max_lag, normalizes by lag 0,
    and fits gamma in gamma^2 / (lag^2 + gamma^2) by a bracketed scan
    (200 log-spaced candidates between one sample and max_lag) followed by
    golden-section refinement.  The returned width is in abscissa units:
    the fitted lag count times the series step, exactly.

    max_lag defaults to len(series) // 8; the series must be at least
    four max_lag long.
    """
    lags, chat = autocorr_curve(series, max_lag=max_lag, detrend=detrend, mode=mode)
    max_lag = lags.size - 1

    def sse(gamma: float) -> float:
        model = gamma * gamma / (lags * lags + gamma * gamma)
        diff = chat - model
        return float(np.mean(diff * diff))

    candidates = np.geomspace(1.0, float(max_lag), _SCAN_POINTS)
    losses = np.array([sse(g) for g in candidates])
    best = int(np.argmin(losses))
    lo = candidates[max(best - 1, 0)]
    hi = candidates[min(best + 1, candidates.size - 1)]
    if lo == hi:
        gamma_samples = float(lo)
    else:
        gamma_samples = _golden_section_min(sse, lo, hi)

    # residual over the coherence region: lags beyond a few widths carry
    # no shape information and would wash out a bad near-lag fit
    n_resid = int(min(max_lag, max(4, np.ceil(4.0 * gamma_samples)))) + 1
    model = gamma_samples * gamma_samples / (lags[:n_resid] ** 2 + gamma_samples * gamma_samples)
    residual = float(np.sqrt(np.mean((chat[:n_resid] - model) ** 2)))
    flags = ("poor-fit",) if residual > residual_ceiling else ()
    return StrengthEstimate(
        gamma_hat=gamma_samples * series.step,
        d_hat=None,
        ratio=None,
        fit_residual=residual,
        window=(series.start, series.end),
        n_lags_used=max_lag + 1,
        flags=flags,
    )


def estimate_mean_spacing(series: SpectrumSeries,
                          min_prominence: float = DEFAULT_MIN_PROMINENCE) -> float | None:
    """Mean separation of prominent local maxima, or None if under three.

    A maximum counts when its prominence exceeds min_prominence times the
    value range.  In overlapped regimes the detected maxima are
    fluctuation bumps rather than levels; callers should treat the result
    accordingly (see strength_function's `overlapped` flag).
    """
    if len(series) < 16:
        raise ParameterError("series must have at least 16 samples")
    values = series.values
    value_range = float(values.max() - values.min())
    if value_range == 0.0:
        return None
    peaks, _ = find_peaks(values, prominence=min_prominence * value_range)
    if peaks.size < 3:
        return None
    return float(np.mean(np.diff(peaks))) * series.step


def strength_function(series: SpectrumSeries, max_lag: int | None = None,
                      detrend: bool = True, mode: str = MEAN_NORMALIZED,
                      min_prominence: float = DEFAULT_MIN_PROMINENCE,
                      residual_ceiling: float = DEFAULT_RESIDUAL_CEILING) -> StrengthEstimate:
    """Combine the coherence-width and spacing estimators into one ratio."""
    est = estimate_coherence_width(
        series, max_lag=max_lag, detrend=detrend, mode=mode,
        residual_ceiling=residual_ceiling,
    )
    d_hat = estimate_mean_spacing(series, min_prominence=min_prominence)
    flags = list(est.flags)
    ratio = None
    if d_hat is None:
        flags.append("too-few-peaks")
    else:
        ratio = est.gamma_hat / d_hat
        if d_hat < OVERLAP_SPACING_FACTOR * est.gamma_hat:
            # spacing of fluctuation maxima, not resolved levels
            flags.append("overlapped")
    return StrengthEstimate(
        gamma_hat=est.gamma_hat,
        d_hat=d_hat,
        ratio=ratio,
        fit_residual=est.fit_residual,
        window=est.window,
        n_lags_used=est.n_lags_used,
        flags=tuple(flags),
    )


def predict_day(series: SpectrumSeries, train_seconds: float,
                threshold: float = DEFAULT_DRIFT_THRESHOLD,
                max_lag: int | None = None, detrend: bool = True,
                mode: str = MEAN_NORMALIZED,
                min_prominence: float = DEFAULT_MIN_PROMINENCE) -> PredictionReport:
    """First-window protocol: estimate on the opening window, compare to the rest.

    The training window must be at least MIN_TRAIN_SECONDS and at most
    half the session.  The verdict is `stable` when the coherence width
    moved by no more than ``threshold`` relative to the holdout value,
    `drifted` when it moved more, and `withheld` when either window could
    not be estimated.
    """
    if threshold <= 0:
        raise ParameterError("threshold must be positive")
    session = series.span
    if not MIN_TRAIN_SECONDS <= train_seconds <= 0.5 * session:
        raise ParameterError(
            f"train_seconds must lie in [{MIN_TRAIN_SECONDS:.0f}, session/2 = {0.5 * session:.0f}]"
        )
    n_train = int(round(train_seconds / series.step))
    train = SpectrumSeries(series.start, series.step, series.values[:n_train])
    holdout = SpectrumSeries(series.start + n_train * series.step, series.step,
                             series.values[n_train:])

    def try_estimate(window_series):
        try:
            return strength_function(
                window_series, max_lag=max_lag, detrend=detrend, mode=mode,
                min_prominence=min_prominence,
            )
        except ToolkitError:
            return None

    train_est = try_estimate(train)
    holdout_est = try_estimate(holdout)
    if train_est is None or holdout_est is None:
        return PredictionReport(
            train_estimate=train_est,
            holdout_estimate=holdout_est,
            relative_drift=None,
            verdict=VERDICT_WITHHELD,
            threshold=threshold,
        )
    drift = abs(train_est.gamma_hat - holdout_est.gamma_hat) / holdout_est.gamma_hat
    verdict = VERDICT_STABLE if drift <= threshold else VERDICT_DRIFTED
    return PredictionReport(
        train_estimate=train_est,
        holdout_estimate=holdout_est,
        relative_drift=drift,
        verdict=verdict,
        threshold=threshold,
    )
