import numpy as np
import pytest

import rfluct as rf
from conftest import fine_session, lorentzian_series, overlapped_spectrum


class TestDetrend:
    def test_removes_slope_keeps_mean(self):
        rng = np.random.default_rng(1)
        values = 10.0 + 0.05 * np.arange(500) + rng.normal(0, 0.5, 500)
        flat = rf.detrend_keep_mean(values)
        assert np.isclose(flat.mean(), values.mean(), rtol=1e-12)
        slope = np.polyfit(np.arange(500), flat, 1)[0]
        assert abs(slope) < 1e-12

    def test_short_series_passthrough(self):
        v = np.array([3.0])
        assert np.array_equal(rf.detrend_keep_mean(v), v)


class TestCoherenceWidth:
    def test_constructed_lorentzian_recovered(self):
        # the construction oracle fixes the true width at 12 samples
        series = lorentzian_series(16384, 12.0, 50.0, seed=3)
        est = rf.estimate_coherence_width(series, max_lag=96)
        assert abs(est.gamma_hat - 12.0) / 12.0 < 0.02
        assert est.fit_residual < 0.02
        assert est.flags == ()

    def test_width_in_abscissa_units(self):
        series = lorentzian_series(8192, 8.0, 50.0, seed=4)
        scaled = rf.SpectrumSeries(series.start, 10.0, series.values)
        a = rf.estimate_coherence_width(series, max_lag=64)
        b = rf.estimate_coherence_width(scaled, max_lag=64)
        assert b.gamma_hat == a.gamma_hat * 10.0

    def test_affine_invariance(self):
        series = lorentzian_series(8192, 8.0, 50.0, seed=5)
        shifted = rf.SpectrumSeries(0.0, 1.0, 3.0 * series.values + 7.0)
        a = rf.estimate_coherence_width(series, max_lag=64)
        b = rf.estimate_coherence_width(shifted, max_lag=64)
        assert np.isclose(a.gamma_hat, b.gamma_hat, rtol=1e-6)

    def test_overlapped_spectrum_recovery(self):
        gammas = [rf.estimate_coherence_width(overlapped_spectrum(seed, 7.0)).gamma_hat
                  for seed in range(10)]
        median = float(np.median(gammas))
        assert abs(median - 7.0) / 7.0 < 0.35

    def test_white_noise_collapses_to_sample_scale(self):
        rng = np.random.default_rng(6)
        series = rf.SpectrumSeries(0.0, 1.0, 100.0 + rng.normal(0, 5, 2048))
        est = rf.estimate_coherence_width(series)
        assert est.gamma_hat < 2.0
        assert "poor-fit" in est.flags

    def test_series_too_short_for_lags(self):
        series = rf.SpectrumSeries(0.0, 1.0, np.ones(64) + np.arange(64))
        with pytest.raises(rf.ParameterError):
            rf.estimate_coherence_width(series, max_lag=32)

    def test_flat_series_errors(self):
        series = rf.SpectrumSeries(0.0, 1.0, np.full(256, 5.0))
        with pytest.raises(rf.FlatSeriesError):
            rf.estimate_coherence_width(series)

    def test_monotone_recovery(self):
        medians = []
        for width in (2.0, 4.0, 8.0, 16.0):
            gams = [rf.estimate_coherence_width(
                overlapped_spectrum(seed, width, n_levels=1200, step=1.0)).gamma_hat
                for seed in range(12)]
            medians.append(np.median(gams))
        assert all(a < b for a, b in zip(medians, medians[1:]))

    def test_autocorr_curve_shape(self):
        series = lorentzian_series(4096, 6.0, 20.0, seed=7)
        lags, chat = rf.estimator.autocorr_curve(series, max_lag=32)
        assert lags.size == 33 and chat[0] == 1.0


class TestMeanSpacing:
    def test_isolated_resonances_within_ten_percent(self):
        for seed in (0, 4, 7):
            spec = rf.EnsembleSpec(n_levels=200, mean_spacing=1.0, mean_width_main=0.004,
                                   eliminated_width=0.002, width_dof=2, seed=seed,
                                   window=(-100.0, 100.0))
            levels = rf.build_level_ladder(spec)
            lo, hi = -80.0, 80.0
            npts = int((hi - lo) / 0.0025) + 1
            cfg = rf.ReactionConfig(grid=(lo, hi, npts), include_prefactor=False)
            spectrum = rf.evaluate_spectrum(levels, cfg)
            inside = np.sort([lv.position for lv in levels if lo < lv.position < hi])
            true_spacing = float(np.diff(inside).mean())
            d_hat = rf.estimate_mean_spacing(spectrum)
            assert d_hat is not None
            assert abs(d_hat - true_spacing) / true_spacing < 0.10

    def test_monotone_series_has_no_spacing(self):
        series = rf.SpectrumSeries(0.0, 1.0, np.linspace(1.0, 5.0, 64))
        assert rf.estimate_mean_spacing(series) is None

    def test_too_short_rejected(self):
        with pytest.raises(rf.ParameterError):
            rf.estimate_mean_spacing(rf.SpectrumSeries(0.0, 1.0, np.ones(8)))

    def test_overlapped_spacing_reflects_fluctuations(self):
        # true spacing is 1.0; detected maxima sit at coherence-width scale
        spectrum = overlapped_spectrum(3, 7.0)
        d_hat = rf.estimate_mean_spacing(spectrum)
        assert d_hat is not None and d_hat > 5.0


class TestStrengthFunction:
    def test_fine_component_ratio_in_band(self):
        hits = 0
        for seed in range(8):
            est = rf.strength_function(fine_session(
                seed, mean_spacing=240.0, mean_width=96.0, width_dof=1))
            if est.ratio is not None and 0.25 <= est.ratio <= 0.6:
                hits += 1
        assert hits >= 5

    def test_overlapped_flag(self):
        est = rf.strength_function(overlapped_spectrum(3, 7.0))
        assert "overlapped" in est.flags
        est_resolved = rf.strength_function(fine_session(
            0, mean_spacing=240.0, mean_width=96.0, width_dof=1))
        assert "overlapped" not in est_resolved.flags

    def test_constant_series_errors(self):
        series = rf.SpectrumSeries(0.0, 1.0, np.full(128, 2.0))
        with pytest.raises(rf.ToolkitError):
            rf.strength_function(series)

    def test_scale_invariance_of_ratio(self):
        series = fine_session(1, mean_spacing=240.0, mean_width=96.0, width_dof=1)
        doubled = rf.SpectrumSeries(series.start, series.step, 2.0 * series.values)
        a = rf.strength_function(series)
        b = rf.strength_function(doubled)
        assert np.isclose(a.ratio, b.ratio, rtol=1e-6)

    def test_ratio_present_iff_spacing(self):
        est = rf.strength_function(fine_session(2))
        assert (est.d_hat is None) == (est.ratio is None)


class TestPredictDay:
    def test_train_window_bounds(self):
        series = fine_session(0)
        with pytest.raises(rf.ParameterError):
            rf.predict_day(series, train_seconds=600.0)
        with pytest.raises(rf.ParameterError):
            rf.predict_day(series, train_seconds=20000.0)

    def test_stationary_sessions_mostly_stable(self):
        verdicts = [rf.predict_day(fine_session(seed), train_seconds=7200.0).verdict
                    for seed in range(10)]
        assert verdicts.count("stable") >= 7

    def test_regime_change_detected(self):
        drifted = 0
        for seed in range(10):
            first = fine_session(seed, mean_width=30.0)
            second = fine_session(seed, mean_width=60.0, seed_base=9000)
            values = np.concatenate([first.values[:1170], second.values[1170:]])
            series = rf.SpectrumSeries(0.0, 10.0, values)
            if rf.predict_day(series, train_seconds=7200.0).verdict == "drifted":
                drifted += 1
        assert drifted >= 6

    def test_periodic_series_has_tiny_drift(self):
        # identical noiseless structure in both windows by construction
        block = lorentzian_series(720, 8.0, 100.0, seed=5, step=10.0)
        series = rf.SpectrumSeries(0.0, 10.0, np.tile(block.values, 3))
        report = rf.predict_day(series, train_seconds=7200.0)
        assert report.relative_drift < 0.05
        assert report.verdict == "stable"

    def test_withheld_when_window_unestimable(self):
        opening = fine_session(0).values[:720]
        values = np.concatenate([opening, np.full(1620, opening.mean())])
        series = rf.SpectrumSeries(0.0, 10.0, values)
        report = rf.predict_day(series, train_seconds=7200.0)
        assert report.verdict == "withheld"
        assert report.relative_drift is None
        assert report.holdout_estimate is None
        assert report.train_estimate is not None

    def test_concatenated_session_drift_below_seed_spread(self):
        single = [rf.predict_day(fine_session(seed), train_seconds=7200.0).relative_drift
                  for seed in range(12)]
        spread = float(np.percentile(single, 80))
        concat_drifts = []
        for seed in range(6):
            base = fine_session(seed)
            doubled = rf.SpectrumSeries(0.0, 10.0, np.tile(base.values, 2))
            concat_drifts.append(rf.predict_day(doubled, train_seconds=7200.0).relative_drift)
        assert float(np.median(concat_drifts)) < spread

    def test_invalid_threshold(self):
        with pytest.raises(rf.ParameterError):
            rf.predict_day(fine_session(0), train_seconds=7200.0, threshold=0.0)
