import numpy as np
import pytest

from cyclemodes.growth import to_growth
from cyclemodes.spectrum import (
    averaged_power_spectrum,
    chopped_spectra,
    continuous_spectrum,
    default_chops,
    half_wavenumbers,
)
from cyclemodes.synthetic import panel_from_rates, white_noise_panel


def cosine_panel(n_prime=240, n_series=6, k=4, phases=None):
    t = np.arange(n_prime)
    rates = np.stack(
        [np.cos(2 * np.pi * k * t / n_prime + (0.0 if phases is None else phases[s]))
         for s in range(n_series)], axis=1)
    return panel_from_rates(rates)


class TestAveragedPowerSpectrum:
    def test_pure_cosine_concentrates(self):
        # every normalized series is sqrt(2) cos(omega_4 t): p(omega_4) = N'/2
        gp = to_growth(cosine_panel())
        spec = averaged_power_spectrum(gp)
        n_prime = gp.n_prime
        assert spec.power[4] == pytest.approx(n_prime / 2, rel=1e-10)
        assert spec.power[n_prime - 4] == pytest.approx(n_prime / 2, rel=1e-10)
        others = np.delete(spec.power, [4, n_prime - 4])
        assert np.max(others) < 1e-9

    def test_total_power_is_n_prime(self, white_growth):
        spec = averaged_power_spectrum(white_growth)
        assert spec.power.sum() == pytest.approx(239.0, rel=1e-10)

    def test_zero_frequency_coefficients_vanish(self, white_growth):
        spec = averaged_power_spectrum(white_growth)
        assert np.max(np.abs(spec.coefficients[0])) < 1e-10

    def test_mirror_symmetry(self, white_growth):
        spec = averaged_power_spectrum(white_growth)
        p = spec.power
        for k in range(1, 120):
            assert p[k] == pytest.approx(p[239 - k], rel=1e-10)

    def test_half_range_minimum_period(self, white_growth):
        spec = averaged_power_spectrum(white_growth)
        k_max = spec.half_range.max()
        assert spec.periods[k_max] == pytest.approx(2 * 239 / (239 - 1))

    def test_half_range_even_includes_nyquist(self):
        assert half_wavenumbers(10).tolist() == [1, 2, 3, 4, 5]
        assert half_wavenumbers(9).tolist() == [1, 2, 3, 4]


class TestchoppedSpectra:
    def test_identity_chop(self, white_growth):
        rng = np.random.default_rng(101)
        panel = white_noise_panel(rng, n_months=120, n_goods=3)
        full = averaged_power_spectrum(to_growth(panel))
        only = chopped_spectra(panel, [120])[0]
        assert np.allclose(only.power, full.power)

    def test_default_chop_set_matches_rule(self):
        assert default_chops(240) == tuple(range(234, 163, -5))
        assert len(default_chops(240)) == 15

    def test_chop_floor(self):
        rng = np.random.default_rng(102)
        panel = white_noise_panel(rng, n_months=60, n_goods=2)
        with pytest.raises(ValueError, match="floor"):
            chopped_spectra(panel, [10])

    def test_short_period_stability(self):
        # chopped spectra agree with the full one within 20% RMS for T <= 24
        rng = np.random.default_rng(2024)
        panel = white_noise_panel(rng, n_months=240, n_goods=21)
        gp = to_growth(panel)
        full = averaged_power_spectrum(gp)
        kf = np.arange(1, (full.n_prime - 1) // 2 + 1)
        tf, pf = full.n_prime / kf, full.power[kf]
        for cs in chopped_spectra(panel):
            ks = np.arange(1, (cs.n_prime - 1) // 2 + 1)
            ts = cs.n_prime / ks
            mask = ts <= 24
            interp = np.interp(ts[mask], tf[::-1], pf[::-1])
            rel = (cs.power[ks[mask]] - interp) / interp
            assert np.sqrt(np.mean(rel**2)) <= 0.20


class TestContinuousSpectrum:
    def test_grid_coincidence_with_discrete(self, white_growth):
        spec = averaged_power_spectrum(white_growth)
        ks = np.array([5, 10, 20])
        periods = 239.0 / ks
        cont = continuous_spectrum(white_growth, t_min=2.0, t_max=239.0, step=1.0)
        # evaluate exactly at the grid periods through the same machinery
        from cyclemodes.numerics import dft_at_frequency
        vals = (np.abs(dft_at_frequency(white_growth.rates_norm,
                                        2 * np.pi / periods)) ** 2).mean(axis=1)
        assert np.allclose(vals, spec.power[ks], atol=1e-10)
        assert cont.power.shape == cont.periods.shape

    def test_planted_peaks_found(self):
        t = np.arange(240)
        rates = np.stack([
            np.cos(2 * np.pi * t / 60.0 + 0.3 * s) + 0.6 * np.cos(2 * np.pi * t / 40.0 - 0.2 * s)
            for s in range(6)
        ], axis=1)
        rng = np.random.default_rng(103)
        gp = to_growth(panel_from_rates(rates + 0.1 * rng.standard_normal(rates.shape)))
        cont = continuous_spectrum(gp, t_min=24.0, t_max=120.0, step=0.01)
        top = sorted(p.period for p in cont.peaks[:2])
        assert top[0] == pytest.approx(40.0, abs=1.0)
        assert top[1] == pytest.approx(60.0, abs=1.0)
        assert not cont.peaks[0].one_time_event

    def test_one_time_event_flag(self):
        # a period spanning fewer than 3 cycles of the sample is flagged
        t = np.arange(240)
        rates = np.tile(np.cos(2 * np.pi * t / 100.0)[:, None], (1, 3))
        rng = np.random.default_rng(104)
        gp = to_growth(panel_from_rates(rates + 0.05 * rng.standard_normal(rates.shape)))
        cont = continuous_spectrum(gp, t_min=24.0, t_max=150.0, step=0.05)
        lead = cont.peaks[0]
        assert lead.period == pytest.approx(100.0, abs=2.0)
        assert lead.one_time_event
        assert lead.cycles_spanned < 3.0

    def test_grid_validation(self, white_growth):
        with pytest.raises(ValueError):
            continuous_spectrum(white_growth, t_min=1.0, t_max=100.0)
        with pytest.raises(ValueError):
            continuous_spectrum(white_growth, t_min=24.0, t_max=500.0)
        with pytest.raises(ValueError):
            continuous_spectrum(white_growth, t_min=24.0, t_max=100.0, step=0.0)
