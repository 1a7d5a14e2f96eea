"""Figure rendering for simulation and estimation outputs.

Every function saves a PNG next to the delimited output it illustrates
and returns the path.  Imports matplotlib with the Agg backend so runs
work headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .series import SpectrumSeries

_DPI = 150


def _finish(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def save_spectrum_figure(series: SpectrumSeries, path, title: str = "",
                         xlabel: str = "energy", ylabel: str = "cross section") -> Path:
    fig, ax = plt.subplots(figsize=(9, 3.2))
    ax.plot(series.abscissa, series.values, lw=0.7, color="navy")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.margins(x=0)
    return _finish(fig, path)


def save_session_figure(composed: SpectrumSeries, parts, path, title: str = "") -> Path:
    """Composed index on top, per-component panels below."""
    n_rows = 1 + len(parts)
    fig, axes = plt.subplots(n_rows, 1, figsize=(9, 2.2 * n_rows), sharex=True)
    axes = np.atleast_1d(axes)
    t = composed.abscissa / 60.0
    axes[0].plot(t, composed.values, lw=0.7, color="black")
    axes[0].set_ylabel("index")
    if title:
        axes[0].set_title(title)
    for ax, (spec, part) in zip(axes[1:], parts):
        ax.plot(part.abscissa / 60.0, part.values, lw=0.7)
        ratio = spec.mean_width / spec.mean_spacing
        ax.set_ylabel(f"{spec.label}\nwidth/spacing={ratio:g}")
    axes[-1].set_xlabel("minutes from open")
    for ax in axes:
        ax.margins(x=0)
    return _finish(fig, path)


def save_intensity_histogram(w: np.ndarray, path, bins: int = 40) -> Path:
    """Normalized-intensity histogram with the unit-mean exponential curve."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(w, bins=bins, density=True, color="cornflowerblue", ec="k", lw=0.5,
            label=f"{w.size} samples")
    grid = np.linspace(0.0, float(w.max()), 400)
    ax.plot(grid, np.exp(-grid), "r-", label="exp(-w)")
    ax.set_xlabel("normalized intensity w")
    ax.set_ylabel("density")
    ax.legend()
    return _finish(fig, path)


def save_lorentzian_identity_figure(deltas, c_values, amp_sq, path) -> Path:
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6, 5), sharex=True,
                                      height_ratios=[3, 1])
    top.plot(deltas, c_values, "b-", lw=1.2, label="intensity form")
    top.plot(deltas, amp_sq, "r--", lw=1.2, label="|amplitude form|^2")
    top.set_ylabel("autocorrelation")
    top.legend()
    bottom.semilogy(deltas, np.abs(np.asarray(c_values) - np.asarray(amp_sq)) + 1e-20,
                    "k-", lw=0.8)
    bottom.set_ylabel("|difference|")
    bottom.set_xlabel("offset")
    return _finish(fig, path)


def save_autocorr_fit_figure(lags, measured, fitted, gamma_hat: float, path,
                             unit: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(lags, measured, "ko", ms=3, label="measured")
    ax.plot(lags, fitted, "r-", lw=1.2,
            label=f"lorentzian fit, width={gamma_hat:.4g}{(' ' + unit) if unit else ''}")
    ax.set_xlabel(f"lag{(' (' + unit + ')') if unit else ''}")
    ax.set_ylabel("normalized autocorrelation")
    ax.legend()
    return _finish(fig, path)


def save_prediction_figure(series: SpectrumSeries, train_seconds: float, report, path) -> Path:
    fig, ax = plt.subplots(figsize=(9, 3.5))
    t = series.abscissa / 60.0
    ax.plot(t, series.values, lw=0.7, color="black")
    ax.axvline(series.start / 60.0 + train_seconds / 60.0, color="red", ls="--", lw=1.2,
               label="train/holdout split")
    pieces = [f"verdict: {report.verdict}"]
    if report.relative_drift is not None:
        pieces.append(f"drift {report.relative_drift:.2%} vs threshold {report.threshold:.0%}")
    ax.set_title("  |  ".join(pieces))
    ax.set_xlabel("minutes from open")
    ax.set_ylabel("index")
    ax.legend(loc="upper right")
    ax.margins(x=0)
    return _finish(fig, path)
