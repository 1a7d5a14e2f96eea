"""Shared builders and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np

import rfluct as rf


def breit_wigner_sq(gn, gi, ge, e_level, e):
    """One-level transition probability: the independent algebraic oracle."""
    total = gn + gi + ge
    amp = np.sqrt(gn * gi) / 2.0 / (e_level - e - 0.5j * total)
    return np.abs(amp) ** 2


def lorentzian_series(n: int, gamma_samples: float, mean_level: float, seed: int,
                      step: float = 1.0) -> rf.SpectrumSeries:
    """Series whose autocorrelation is the Lorentzian law, by construction.

    Synthesizes cosines at the Fourier frequencies with amplitudes fixed by
    the circulant spectrum of the target autocovariance and random phases;
    whole-period orthogonality makes the circular autocovariance equal the
    target independently of the phase draw, and the sample mean equal
    mean_level exactly.
    """
    k = np.arange(n)
    folded = np.minimum(k, n - k).astype(float)
    target = gamma_samples**2 / (folded**2 + gamma_samples**2)
    power = np.clip(np.fft.rfft(target).real, 0.0, None)
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, power.size)
    coeffs = np.zeros(power.size, dtype=complex)
    # drop the flat (j=0) and Nyquist terms; they only shift the mean
    coeffs[1:-1] = (n / 2.0) * 2.0 * np.sqrt(power[1:-1] / n) * np.exp(1j * phases[1:-1])
    values = mean_level + np.fft.irfft(coeffs, n)
    return rf.SpectrumSeries(0.0, step, values)


def overlapped_spectrum(seed: int, mean_width: float, n_levels: int = 1000,
                        step: float = 0.5, mean_spacing: float = 1.0,
                        eliminated_fraction: float = 0.9) -> rf.SpectrumSeries:
    """Strongly overlapped cross-section spectrum with tail padding.

    The eliminated channels carry most of the width budget so the total
    width stays essentially constant level to level, the regime in which
    the coherence width tracks the mean total width.
    """
    elim = mean_width * eliminated_fraction
    main = 0.5 * (mean_width - elim)
    span = n_levels * mean_spacing
    spec = rf.EnsembleSpec(
        n_levels=n_levels, mean_spacing=mean_spacing, mean_width_main=main,
        eliminated_width=elim, width_dof=1, seed=seed, window=(-span / 2, span / 2),
    )
    levels = rf.build_level_ladder(spec)
    pad = 10.0 * mean_width
    lo, hi = -span / 2 + pad, span / 2 - pad
    npts = int((hi - lo) / step) + 1
    cfg = rf.ReactionConfig(grid=(lo, hi, npts), include_prefactor=False)
    return rf.evaluate_spectrum(levels, cfg)


def fine_session(seed: int, mean_spacing: float = 60.0, mean_width: float = 30.0,
                 width_dof: int = 4, session_length: float = 23400.0,
                 seed_base: int = 1000) -> rf.SpectrumSeries:
    """Stationary single-component synthetic session."""
    fine = rf.StructureSpec(label="fine", mean_spacing=mean_spacing, mean_width=mean_width,
                            width_dof=width_dof, amplitude_scale=30.0, seed=seed_base + seed)
    model = rf.IndexModel(components=(fine,), baseline=15000.0,
                          resolution=10.0, session_length=session_length)
    return rf.compose_index(model)


def count_local_maxima(values: np.ndarray) -> int:
    inner = values[1:-1]
    return int(np.sum((inner > values[:-2]) & (inner > values[2:])))
