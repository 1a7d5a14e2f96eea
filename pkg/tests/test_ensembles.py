import numpy as np
import pytest
from scipy import stats

import rfluct as rf
from rfluct.ensembles import DEFAULT_PAD_WIDTHS


def make_spec(**overrides):
    base = dict(n_levels=100, mean_spacing=1.0, mean_width_main=0.1,
                eliminated_width=0.2, width_dof=1, seed=42, window=(-60.0, 60.0))
    base.update(overrides)
    return rf.EnsembleSpec(**base)


class TestWignerSpacings:
    def test_empty(self):
        rng = np.random.default_rng(0)
        assert rf.sample_wigner_spacings(0, 1.0, rng).size == 0

    def test_mean_converges(self):
        # analytic mean of the surmise is the requested spacing; the
        # tolerance is 3 standard errors with Var = (4/pi - 1) <D>^2
        rng = np.random.default_rng(11)
        s = rf.sample_wigner_spacings(10**6, 1.0, rng)
        assert 0.997 <= s.mean() <= 1.003

    def test_variance_matches_second_moment(self):
        rng = np.random.default_rng(12)
        s = rf.sample_wigner_spacings(10**6, 1.0, rng)
        expected = 4.0 / np.pi - 1.0
        assert abs(s.var() - expected) / expected < 0.01

    def test_all_positive(self):
        for seed in (0, 1, 2):
            rng = np.random.default_rng(seed)
            assert np.all(rf.sample_wigner_spacings(10**5, 0.5, rng) > 0)

    def test_distribution_ks(self):
        rng = np.random.default_rng(13)
        s = rf.sample_wigner_spacings(10**5, 2.0, rng)
        cdf = lambda x: 1.0 - np.exp(-np.pi * x**2 / (4.0 * 2.0**2))
        res = stats.kstest(s, cdf)
        assert res.statistic < 0.01

    def test_bad_parameters(self):
        rng = np.random.default_rng(0)
        with pytest.raises(rf.ParameterError):
            rf.sample_wigner_spacings(5, 0.0, rng)
        with pytest.raises(rf.ParameterError):
            rf.sample_wigner_spacings(-1, 1.0, rng)

    def test_pdf_normalizes(self):
        x = np.linspace(0, 12, 200001)
        pdf = rf.wigner_spacing_pdf(x, 1.5)
        assert abs(np.trapezoid(pdf, x) - 1.0) < 1e-6


class TestScaledChi2:
    def test_large_dof_concentrates(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            value = rf.sample_scaled_chi2(2.0, 10**6, rng)
            assert 1.98 <= value <= 2.02

    def test_porter_thomas_variance(self):
        # dof 1 scaled to unit mean has variance 2
        rng = np.random.default_rng(22)
        draws = rf.sample_scaled_chi2(1.0, 1, rng, size=10**6)
        assert abs(draws.var() - 2.0) / 2.0 < 0.02

    def test_dof_two_is_exponential(self):
        rng = np.random.default_rng(23)
        draws = rf.sample_scaled_chi2(1.0, 2, rng, size=10**6)
        res = stats.kstest(draws, stats.expon(scale=1.0).cdf)
        assert res.statistic < 0.002

    def test_mean_recovered(self):
        rng = np.random.default_rng(24)
        draws = rf.sample_scaled_chi2(3.5, 4, rng, size=10**5)
        assert abs(draws.mean() - 3.5) / 3.5 < 0.02

    def test_zero_dof_rejected(self):
        rng = np.random.default_rng(0)
        with pytest.raises(rf.ParameterError):
            rf.sample_scaled_chi2(1.0, 0, rng)
        with pytest.raises(rf.ParameterError):
            rf.sample_scaled_chi2(1.0, 1.5, rng)
        with pytest.raises(rf.ParameterError):
            rf.sample_scaled_chi2(-1.0, 1, rng)

    def test_scalar_vs_array(self):
        rng = np.random.default_rng(25)
        assert isinstance(rf.sample_scaled_chi2(1.0, 1, rng), float)
        assert rf.sample_scaled_chi2(1.0, 1, rng, size=7).shape == (7,)


class TestLevel:
    def test_total_is_sum(self):
        lv = rf.Level.from_partial_widths(0.0, 0.3, 0.2, 0.5)
        assert lv.width_total == lv.width_elastic + lv.width_inelastic + lv.width_eliminated

    def test_inconsistent_total_rejected(self):
        with pytest.raises(rf.ModelConsistencyError):
            rf.Level(position=0.0, width_elastic=0.3, width_inelastic=0.2,
                     width_eliminated=0.5, width_total=0.9)

    def test_negative_width_rejected(self):
        with pytest.raises(rf.ParameterError):
            rf.Level.from_partial_widths(0.0, -0.1, 0.2, 0.5)


class TestLevelLadder:
    def test_single_level_centered(self):
        spec = make_spec(n_levels=1, window=(-5.0, 5.0))
        (level,) = rf.build_level_ladder(spec)
        assert level.position == 0.0
        assert level.width_total == level.width_elastic + level.width_inelastic + level.width_eliminated

    def test_deterministic(self):
        spec = make_spec(seed=42)
        assert rf.build_level_ladder(spec) == rf.build_level_ladder(spec)

    def test_seed_changes_ladder(self):
        assert rf.build_level_ladder(make_spec(seed=1)) != rf.build_level_ladder(make_spec(seed=2))

    def test_mean_spacing_recovered(self):
        spec = make_spec(n_levels=1000, window=(-600.0, 600.0))
        levels = rf.build_level_ladder(spec)
        pos = np.array([lv.position for lv in levels])
        assert abs(np.diff(pos).mean() - 1.0) < 0.05

    def test_positions_strictly_increasing(self):
        for seed in (3, 4, 5):
            levels = rf.build_level_ladder(make_spec(seed=seed))
            pos = np.array([lv.position for lv in levels])
            assert np.all(np.diff(pos) > 0)

    def test_ladder_centered_on_window(self):
        spec = make_spec(window=(10.0, 30.0))
        levels = rf.build_level_ladder(spec)
        pos = np.array([lv.position for lv in levels])
        assert np.isclose(0.5 * (pos[0] + pos[-1]), 20.0)

    def test_width_change_keeps_positions(self):
        # spacing and width substreams are independent, so width parameters
        # never perturb the sampled positions
        a = rf.build_level_ladder(make_spec(mean_width_main=0.1, eliminated_width=0.2))
        b = rf.build_level_ladder(make_spec(mean_width_main=1.75, eliminated_width=3.5))
        assert all(x.position == y.position for x, y in zip(a, b))

    def test_width_scales_with_mean(self):
        a = rf.build_level_ladder(make_spec(mean_width_main=0.1))
        b = rf.build_level_ladder(make_spec(mean_width_main=0.2))
        ratios = [y.width_elastic / x.width_elastic for x, y in zip(a, b)]
        assert np.allclose(ratios, 2.0, rtol=1e-12)

    def test_eliminated_width_constant(self):
        levels = rf.build_level_ladder(make_spec(eliminated_width=0.37))
        assert all(lv.width_eliminated == 0.37 for lv in levels)

    def test_empirical_ratio_matches_spec(self):
        spec = make_spec(n_levels=10**4, mean_width_main=0.5, eliminated_width=1.0,
                         window=(-6000.0, 6000.0))
        levels = rf.build_level_ladder(spec)
        measured = rf.empirical_strength_ratio(levels)
        assert abs(measured - spec.strength_ratio) / spec.strength_ratio < 0.05


class TestSpecValidation:
    @pytest.mark.parametrize("overrides", [
        dict(n_levels=0),
        dict(mean_spacing=0.0),
        dict(mean_width_main=-0.1),
        dict(eliminated_width=-0.1),
        dict(width_dof=0),
        dict(window=(2.0, 2.0)),
    ])
    def test_invalid_spec(self, overrides):
        with pytest.raises(rf.ParameterError):
            make_spec(**overrides)

    def test_strength_ratio(self):
        spec = make_spec(mean_width_main=0.1, eliminated_width=0.2, mean_spacing=1.0)
        assert np.isclose(spec.strength_ratio, 0.4)

    def test_cover_count_includes_padding(self):
        n = rf.n_levels_to_cover((-50.0, 50.0), 1.0, 2.0)
        assert n >= 100 + 2 * DEFAULT_PAD_WIDTHS * 2.0
