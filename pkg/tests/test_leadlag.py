import numpy as np
import pytest

from cyclemodes.errors import PhaseUndefinedError, SimulationDegenerateError
from cyclemodes.growth import GrowthPanel, to_growth
from cyclemodes.leadlag import (
    phase_delay,
    reshuffle_significance,
    residual_rates,
)
from cyclemodes.modes import project_modes, reconstruct_cycles
from cyclemodes.numerics import RngStream
from cyclemodes.panel import GoodDescriptor, VARIABLES
from cyclemodes.rmt import correlation_matrix
from cyclemodes.synthetic import panel_from_rates


def goods(n):
    return tuple(GoodDescriptor(id=g) for g in range(1, n + 1))


@pytest.fixture(scope="module")
def lag_reconstruction(lag_growth, lag_model):
    md = project_modes(lag_growth, lag_model)
    return reconstruct_cycles(md, (1, 2), (4, 6))


class TestPhaseDelay:
    def test_recovers_planted_delay(self, lag_reconstruction):
        est = phase_delay(lag_reconstruction, ("shipment", "production"), 4)
        assert est.delta_months == pytest.approx(4.0, abs=0.5)
        assert est.period == pytest.approx(60.0)

    def test_principal_interval(self, lag_reconstruction):
        for pair in (("shipment", "production"), ("production", "inventory")):
            for k in (4, 6):
                est = phase_delay(lag_reconstruction, pair, k)
                assert -est.period / 2 < est.delta_months <= est.period / 2

    def test_antisymmetry(self, lag_reconstruction):
        fwd = phase_delay(lag_reconstruction, ("shipment", "production"), 4)
        rev = phase_delay(lag_reconstruction, ("production", "shipment"), 4)
        # equal magnitudes modulo the period, mapped to the principal interval
        total = (fwd.delta_months + rev.delta_months) % fwd.period
        assert min(total, fwd.period - total) < 1e-9

    def test_single_mode_gives_zero_or_half_period(self, lag_growth, lag_model):
        md = project_modes(lag_growth, lag_model)
        cr = reconstruct_cycles(md, (1,), (4,))
        est = phase_delay(cr, ("shipment", "production"), 4)
        assert (abs(est.delta_months) < 1e-9
                or abs(est.delta_months - est.period / 2) < 1e-9)

    def test_missing_wavenumber_rejected(self, lag_reconstruction):
        with pytest.raises(ValueError):
            phase_delay(lag_reconstruction, ("shipment", "production"), 5)

    def test_unknown_variable_rejected(self, lag_reconstruction):
        with pytest.raises(ValueError):
            phase_delay(lag_reconstruction, ("shipment", "exports"), 4)

    def test_vanishing_amplitude_rejected(self, white_growth, white_model):
        # wavenumber with zero planted signal in a one-mode reconstruction of a
        # panel built to have no power at that k
        t = np.arange(100)
        w = np.outer(np.cos(2 * np.pi * 10 * t / 100), white_model.eigenvectors[:, 0])
        gp = GrowthPanel(rates_raw=w, rates_norm=w, means=np.zeros(63),
                         stds=np.ones(63), start_month=(2000, 1),
                         goods=goods(21), variables=VARIABLES)
        from dataclasses import replace
        md = project_modes(gp, replace(white_model, n_prime=100))
        cr = reconstruct_cycles(md, (1,), (4,))
        with pytest.raises(PhaseUndefinedError):
            phase_delay(cr, ("shipment", "production"), 4)


class TestResidual:
    def test_residual_orthogonal_to_leading_modes(self, lag_growth, lag_model):
        resid = residual_rates(lag_growth, lag_model, n_modes=2)
        proj = resid @ lag_model.eigenvectors[:, :2]
        assert np.max(np.abs(proj)) < 1e-10

    def test_residual_plus_modes_is_identity(self, lag_growth, lag_model):
        resid = residual_rates(lag_growth, lag_model, n_modes=2)
        v12 = lag_model.eigenvectors[:, :2]
        two_mode = (lag_growth.rates_norm @ v12) @ v12.T
        assert np.allclose(resid + two_mode, lag_growth.rates_norm, atol=1e-12)


class TestReshuffleSignificance:
    def test_identity_permutation_reproduces_observed(self, lag_growth, lag_model):
        mc = reshuffle_significance(
            lag_growth, lag_model, trials=100, rng=RngStream(1),
            permutation_sampler=lambda gen, r: r,
        )
        assert mc.trials_used == 100
        for res in mc.results:
            for stats in (res.reestimated, res.frozen):
                assert stats.mean == pytest.approx(res.observed, abs=1e-9)
                assert stats.std == pytest.approx(0.0, abs=1e-9)

    def test_null_centers_on_observed(self, lag_growth, lag_model):
        mc = reshuffle_significance(lag_growth, lag_model, trials=300,
                                    rng=RngStream(2))
        by_key = {(r.label, r.k): r for r in mc.results}
        sp60 = by_key[("SP", 4)]
        # planted frequency: tight null around the observed delay, which sits
        # inside the empirical 95% CI
        assert sp60.reestimated.ci_low <= sp60.observed <= sp60.reestimated.ci_high
        assert abs(sp60.reestimated.mean - sp60.observed) < 0.5
        assert sp60.frozen.ci_low <= sp60.observed <= sp60.frozen.ci_high

    def test_zero_residual_panel_degenerate_null(self):
        # two pure orthogonal sinusoid factors, no noise: permuting a zero
        # residual changes nothing
        n_prime, n_goods = 240, 7
        t = np.arange(n_prime)
        load1 = np.array([1.0, 1.0, -0.3])
        load2 = np.array([0.3, 0.0, 1.0])
        c1 = np.cos(2 * np.pi * 4 * t / n_prime)
        c2 = 0.8 * np.cos(2 * np.pi * 4 * (t - 15.0) / n_prime)
        z = np.empty((n_prime, 3 * n_goods))
        for vi in range(3):
            for g in range(n_goods):
                z[:, vi * n_goods + g] = load1[vi] * c1 + load2[vi] * c2
        gp = to_growth(panel_from_rates(z))
        model = correlation_matrix(gp)
        mc = reshuffle_significance(gp, model, trials=100, rng=RngStream(3),
                                    wavenumbers=(4,))
        for res in mc.results:
            assert res.reestimated.std == pytest.approx(0.0, abs=1e-9)
            assert res.reestimated.mean == pytest.approx(res.observed, abs=1e-9)

    def test_permutation_preserves_marginals(self):
        rng = RngStream(4).generator()
        resid = np.arange(60, dtype=float).reshape(20, 3)
        permuted = rng.permuted(resid, axis=0)
        assert np.array_equal(np.sort(permuted, axis=0), np.sort(resid, axis=0))
        assert not np.array_equal(permuted, resid)

    def test_trial_accounting(self, lag_growth, lag_model):
        mc = reshuffle_significance(lag_growth, lag_model, trials=120,
                                    rng=RngStream(5))
        assert mc.trials_used + mc.trials_rejected == mc.trials_requested == 120
        assert 0 < mc.acceptance_rate <= 1

    def test_no_structure_rejects_all_trials(self, white_growth, white_model):
        # white-noise panel under the strict overlap criterion: nothing passes
        with pytest.raises(SimulationDegenerateError):
            reshuffle_significance(white_growth, white_model, trials=100,
                                   rng=RngStream(6), accept="mp_overlap",
                                   overlap_threshold=0.9999)

    def test_reproducible_and_chunk_invariant(self, lag_growth, lag_model):
        a = reshuffle_significance(lag_growth, lag_model, trials=100,
                                   rng=RngStream(7), chunk=13)
        b = reshuffle_significance(lag_growth, lag_model, trials=100,
                                   rng=RngStream(7), chunk=100)
        key = ("reestimated", "SP", 4)
        assert np.array_equal(a.samples[key], b.samples[key])

    def test_minimum_trials_enforced(self, lag_growth, lag_model):
        with pytest.raises(ValueError):
            reshuffle_significance(lag_growth, lag_model, trials=50,
                                   rng=RngStream(8))
