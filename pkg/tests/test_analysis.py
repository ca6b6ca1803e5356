import math

import pytest

from mats.analysis import analyze
from mats.model import ModelConfig, StageTwoCounts, TrialData

from conftest import make_settings
from oracles import reduced_probs_2d


@pytest.fixture
def settings():
    return make_settings(n_iterations=3000, burn_in=1000, seed=4)


class TestInterim:
    def test_all_zero_responders_all_no_go(self, config, settings):
        data = TrialData((0, 0, 0, 0), (20, 20, 20, 20))
        report = analyze(data, config, settings, "interim")
        assert report.decisions.go_stage1 == (0, 0, 0, 0)
        assert all(p < 0.05 for p in report.decisions.posterior_probs["go"])
        assert report.decisions.final == (None,) * 4

    def test_uses_stage1_only(self, config, settings):
        full = TrialData(
            (9, 4, 2, 4), (20,) * 4, (1, 0, 0, 0),
            (StageTwoCounts(10, 20, 4, 20), None, None, None),
        )
        a = analyze(full, config, settings, "interim")
        b = analyze(full.stage1_only(), config, settings, "interim")
        assert a.decisions == b.decisions
        assert a.posterior_summaries == b.posterior_summaries

    def test_deterministic(self, config, settings):
        data = TrialData((5, 9, 2, 4), (20,) * 4)
        a = analyze(data, config, settings, "interim")
        b = analyze(data, config, settings, "interim")
        assert a.decisions == b.decisions
        assert a.posterior_summaries == b.posterior_summaries


class TestFinal:
    def test_strong_stage2_passes_both_poc(self, settings):
        # high 16/20 and low 15/20 against a 0.2 reference: both doses show
        # proof of concept; cross-checked against the reduced-model oracle
        cfg = ModelConfig(reference_rates=(0.2,), target_rates=(0.5,))
        tau1 = cfg.tau1()[0]
        ph, pl, _ = reduced_probs_2d(10, 20, 16, 20, 15, 20, 0.2, tau1, cfg.tau2)
        assert ph > 0.5 and pl > 0.5
        data = TrialData((10,), (20,), (1,), (StageTwoCounts(16, 20, 15, 20),))
        report = analyze(data, cfg, settings, "final")
        rec = report.decisions
        assert rec.poc_high[0] == 1 and rec.poc_low[0] == 1
        assert rec.final[0] in (1, 2)

    def test_no_go_indication_is_error(self, config, settings):
        data = TrialData((0, 0, 0, 0), (20,) * 4, (0, 0, 0, 0), (None,) * 4)
        with pytest.raises(ValueError, match="GO indication"):
            analyze(data, config, settings, "final")
        undecided = TrialData((0, 0, 0, 0), (20,) * 4)
        with pytest.raises(ValueError, match="GO indication"):
            analyze(undecided, config, settings, "final")

    def test_mixed_go_pattern(self, config, settings):
        data = TrialData(
            (9, 4, 2, 12), (20,) * 4, (1, 0, 0, 1),
            (StageTwoCounts(9, 20, 8, 20), None, None, StageTwoCounts(12, 20, 3, 20)),
        )
        report = analyze(data, config, settings, "final")
        rec = report.decisions
        assert rec.go_stage1 == (1, 0, 0, 1)
        assert rec.final[1] is None and rec.final[2] is None
        assert rec.final[0] is not None and rec.final[3] is not None
        assert report.decision_probs["go"] == (None,) * 4  # not recomputed at final


class TestReportShape:
    def test_summaries_and_rates(self, config, settings):
        data = TrialData((5, 9, 2, 4), (20,) * 4)
        report = analyze(data, config, settings, "interim")
        names = set(report.posterior_summaries)
        assert {"eta[1]", "gamma[4]", "eta0", "sigma2_eta", "gamma0", "sigma2_gamma"} <= names
        for s in report.posterior_summaries.values():
            assert s.q2_5 <= s.mean <= s.q97_5
            assert s.sd >= 0
            assert math.isfinite(s.rhat) and math.isfinite(s.ess)
        assert set(report.derived_rates) == {
            f"{k}[{j}]" for k in ("p1", "p2") for j in range(1, 5)
        }
        for s in report.derived_rates.values():
            assert 0.0 <= s.q2_5 <= s.q97_5 <= 1.0

    def test_to_dict(self, config, settings):
        data = TrialData((5, 9, 2, 4), (20,) * 4)
        d = analyze(data, config, settings, "interim").to_dict()
        assert d["stage"] == "interim"
        assert "decisions" in d and "posterior_summaries" in d

    def test_invalid_stage(self, config, settings):
        with pytest.raises(ValueError, match="stage"):
            analyze(TrialData((0,) * 4, (20,) * 4), config, settings, "middle")

    def test_dimension_mismatch(self, config, settings):
        with pytest.raises(ValueError, match="indications"):
            analyze(TrialData((0,), (20,)), config, settings, "interim")
