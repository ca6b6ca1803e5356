import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from mats.model import (
    HyperPriors,
    ModelConfig,
    ModelState,
    SamplePlan,
    StageTwoCounts,
    TrialData,
    compute_tau1,
    default_config,
    inv_logit,
    log_joint,
    logit,
)


class TestLogit:
    def test_symmetry_point(self):
        assert logit(0.5) == 0.0
        assert inv_logit(0.0) == 0.5

    def test_known_values(self):
        assert logit(0.2) == pytest.approx(-1.3862943611198906, abs=1e-12)
        assert logit(0.3) == pytest.approx(-0.8472978603872036, abs=1e-12)
        assert inv_logit(0.4) == pytest.approx(0.5986876601124520, abs=1e-12)
        assert inv_logit(-1.386294) == pytest.approx(0.2, abs=1e-6)

    def test_domain_errors(self):
        for bad in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                logit(bad)

    def test_round_trip_grid(self):
        grid = np.linspace(0.001, 0.999, 999)
        assert np.max(np.abs(inv_logit(logit(grid)) - grid)) < 1e-12

    @given(st.floats(min_value=0.001, max_value=0.999))
    def test_round_trip_property(self, p):
        assert inv_logit(logit(p)) == pytest.approx(p, abs=1e-12)

    @given(st.floats(min_value=-30, max_value=30))
    def test_inv_logit_monotone_and_bounded(self, x):
        v = inv_logit(x)
        assert 0.0 < v < 1.0
        assert inv_logit(x + 0.5) > v


class TestTau1:
    def test_known_values(self):
        assert compute_tau1(0.2, 0.4) == pytest.approx(0.5389965007326870, abs=1e-9)
        assert compute_tau1(0.1, 0.4) == pytest.approx(1.0986122886681098, abs=1e-9)

    def test_positive_and_continuous_at_zero_gap(self):
        assert compute_tau1(0.2, 0.200001) > 0.0
        assert compute_tau1(0.2, 0.2000001) < 1e-5

    def test_rejects_non_improving_target(self):
        with pytest.raises(ValueError):
            compute_tau1(0.2, 0.2)
        with pytest.raises(ValueError):
            compute_tau1(0.4, 0.2)
        with pytest.raises(ValueError):
            compute_tau1(0.0, 0.4)


class TestConfig:
    def test_defaults(self, config):
        assert config.n_indications == 4
        assert config.tau1() == pytest.approx(
            (1.0986122886681098, 0.7672551527136672, 1.0986122886681098, 0.7672551527136672),
            abs=1e-9,
        )
        assert config.sample_plan.stage1 == (20, 20, 20, 20)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(reference_rates=(0.0, 0.2), target_rates=(0.4, 0.5)),
            dict(reference_rates=(0.1, 0.2), target_rates=(0.4, 1.0)),
            dict(reference_rates=(0.1, 0.2), target_rates=(0.05, 0.5)),
            dict(reference_rates=(0.1, 0.2), target_rates=(0.4,)),
            dict(reference_rates=(), target_rates=()),
            dict(reference_rates=(0.1,), target_rates=(0.4,), s1=1.0),
            dict(reference_rates=(0.1,), target_rates=(0.4,), tau2=0.0),
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            ModelConfig(**kwargs)

    def test_hyper_validation(self):
        with pytest.raises(ValueError):
            HyperPriors(alpha_eta=0.0)
        with pytest.raises(ValueError):
            HyperPriors(sigma2_gamma0=-1.0)

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            SamplePlan((20, 20), (20,), (20, 20))
        with pytest.raises(ValueError):
            SamplePlan((20, 0), (20, 20), (20, 20))

    def test_json_round_trip(self, config):
        again = ModelConfig.from_dict(config.to_dict())
        assert again == config
        assert again.digest() == config.digest()

    def test_from_dict_checks_n_indications(self, config):
        d = config.to_dict()
        d["n_indications"] = 7
        with pytest.raises(ValueError):
            ModelConfig.from_dict(d)


class TestTrialData:
    def test_count_validation(self):
        with pytest.raises(ValueError):
            TrialData((21,), (20,))
        with pytest.raises(ValueError):
            TrialData((-1,), (20,))
        with pytest.raises(ValueError):
            StageTwoCounts(5, 4, 0, 20)

    def test_stage2_requires_matching_decisions(self):
        cell = StageTwoCounts(5, 20, 3, 20)
        TrialData((4, 3), (20, 20), (1, 0), (cell, None))  # valid
        with pytest.raises(ValueError):
            TrialData((4, 3), (20, 20), (1, 0), (None, cell))
        with pytest.raises(ValueError):
            TrialData((4, 3), (20, 20), (1, 0), (None, None))
        with pytest.raises(ValueError):
            TrialData((4, 3), (20, 20), None, (cell, None))

    def test_arrays_zero_fill(self):
        cell = StageTwoCounts(5, 20, 3, 10)
        data = TrialData((4, 3), (20, 20), (0, 1), (None, cell))
        y1, n1, yh2, nh2, yl2, nl2 = data.arrays()
        assert list(y1) == [4, 3] and list(n1) == [20, 20]
        assert list(nh2) == [0, 20] and list(nl2) == [0, 10]
        assert list(yh2) == [0, 5] and list(yl2) == [0, 3]

    def test_json_round_trip(self):
        cell = StageTwoCounts(5, 20, 3, 10)
        data = TrialData((4, 3), (20, 20), (0, 1), (None, cell))
        assert TrialData.from_dict(data.to_dict()) == data


def _single_config():
    return ModelConfig(reference_rates=(0.2,), target_rates=(0.4,))


def _empty_data():
    return TrialData((0,), (0,))


class TestLogJoint:
    def test_outside_support_is_minus_inf(self, config):
        state = ModelState((0.0,) * 4, (0.0, 1.0, 1.0, 1.0), 0.0, 0.1, 0.0, 1.0)
        data = TrialData((0,) * 4, (0,) * 4)
        assert log_joint(state, data, config) == -math.inf
        state = ModelState((0.0,) * 4, (1.0,) * 4, 0.0, -0.1, 0.0, 1.0)
        assert log_joint(state, data, config) == -math.inf

    def test_prior_only_matches_scipy(self):
        # no observations: joint reduces to the prior, cross-checked term by
        # term against scipy densities
        cfg = _single_config()
        state = ModelState((0.3,), (0.8,), 0.1, 0.2, -0.2, 1.5)
        h = cfg.hyper
        expected = (
            stats.norm.logpdf(0.3, 0.1, math.sqrt(0.2))
            + stats.lognorm.logpdf(0.8, math.sqrt(1.5), scale=math.exp(-0.2))
            + stats.norm.logpdf(0.1, h.mu_eta0, math.sqrt(h.sigma2_eta0))
            + stats.invgamma.logpdf(0.2, h.alpha_eta, scale=h.beta_eta)
            + stats.norm.logpdf(-0.2, h.mu_gamma0, math.sqrt(h.sigma2_gamma0))
            + stats.invgamma.logpdf(1.5, h.alpha_gamma, scale=h.beta_gamma)
        )
        assert log_joint(state, _empty_data(), cfg) == pytest.approx(expected, abs=1e-10)

    def test_binomial_term(self):
        # eta = 0 puts p1 at the reference rate 0.2; the data term must be
        # exactly the binomial log-pmf at that rate
        cfg = _single_config()
        state = ModelState((0.0,), (1.0,), 0.0, 0.1, 0.0, 1.0)
        with_data = log_joint(state, TrialData((10,), (20,)), cfg)
        prior_only = log_joint(state, _empty_data(), cfg)
        assert with_data - prior_only == pytest.approx(
            stats.binom.logpmf(10, 20, 0.2), abs=1e-10
        )

    def test_one_observation_delta(self):
        cfg = _single_config()
        state = ModelState((0.4,), (0.6,), 0.0, 0.1, 0.0, 1.0)
        p1 = inv_logit(logit(0.2) + 0.4)
        delta = log_joint(state, TrialData((1,), (1,)), cfg) - log_joint(
            state, _empty_data(), cfg
        )
        assert delta == pytest.approx(stats.binom.logpmf(1, 1, p1), abs=1e-10)

    def test_stage2_terms(self):
        cfg = _single_config()
        state = ModelState((0.5,), (0.7,), 0.0, 0.1, 0.0, 1.0)
        cell = StageTwoCounts(8, 20, 2, 10)
        full = TrialData((6,), (20,), (1,), (cell,))
        interim = TrialData((6,), (20,))
        p1, p2 = state.response_rates(cfg)
        expected = stats.binom.logpmf(8, 20, p1[0]) + stats.binom.logpmf(2, 10, p2[0])
        got = log_joint(state, full, cfg) - log_joint(state, interim, cfg)
        assert got == pytest.approx(expected, abs=1e-10)

    def test_finite_interior_and_boundary_decay(self, config):
        data = TrialData((2, 4, 2, 4), (20,) * 4)
        values = []
        for g in (1.0, 1e-3, 1e-9):
            state = ModelState((0.0,) * 4, (g,) * 4, 0.0, 0.1, 0.0, 1.0)
            values.append(log_joint(state, data, config))
        assert all(math.isfinite(v) for v in values)
        assert values[0] > values[1] > values[2]

    def test_dimension_mismatch(self, config):
        state = ModelState((0.0,), (1.0,), 0.0, 0.1, 0.0, 1.0)
        with pytest.raises(ValueError):
            log_joint(state, TrialData((0,) * 4, (20,) * 4), config)

    @given(
        eta=st.floats(min_value=-3, max_value=3),
        gamma=st.floats(min_value=1e-6, max_value=5),
    )
    def test_monotone_dose_response(self, eta, gamma):
        cfg = _single_config()
        state = ModelState((eta,), (gamma,), 0.0, 0.1, 0.0, 1.0)
        p1, p2 = state.response_rates(cfg)
        assert p1[0] > p2[0]
