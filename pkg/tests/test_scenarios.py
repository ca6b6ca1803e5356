import pytest

from mats.scenarios import (
    Scenario,
    builtin_scenarios,
    get_scenario,
    label_scenario,
    scenario_from_dict,
)

# catalog rates: (DL-H row, DL-L row)
EXPECTED_RATES = {
    "GN": ((0.1, 0.2, 0.1, 0.2), (0.1, 0.2, 0.1, 0.2)),
    "GA-NS": ((0.4, 0.5, 0.4, 0.5), (0.4, 0.5, 0.4, 0.5)),
    "GA-S": ((0.5, 0.6, 0.5, 0.6), (0.4, 0.5, 0.4, 0.5)),
    "Pick-H-All": ((0.4, 0.5, 0.4, 0.5), (0.1, 0.2, 0.1, 0.2)),
    "Pick-H-Partial": ((0.4, 0.5, 0.1, 0.2), (0.1, 0.2, 0.1, 0.2)),
    "Pick-L-Partial": ((0.4, 0.2, 0.1, 0.5), (0.4, 0.2, 0.1, 0.5)),
    "Mixed": ((0.4, 0.2, 0.1, 0.5), (0.4, 0.2, 0.1, 0.2)),
    "Intermediate": ((0.4, 0.2, 0.1, 0.5), (0.3, 0.2, 0.1, 0.4)),
}

# scored indications, correct final decision there, and which selections
# count as a PoC success
EXPECTED_TRUTH = {
    "GN": ((), {}, {}),
    "GA-NS": ((0, 1, 2, 3), {j: 2 for j in range(4)}, {j: {1, 2} for j in range(4)}),
    "GA-S": ((0, 1, 2, 3), {j: 1 for j in range(4)}, {j: {1, 2} for j in range(4)}),
    "Pick-H-All": ((0, 1, 2, 3), {j: 1 for j in range(4)}, {j: {1} for j in range(4)}),
    "Pick-H-Partial": ((0, 1), {0: 1, 1: 1}, {0: {1}, 1: {1}}),
    "Pick-L-Partial": ((0, 3), {0: 2, 3: 2}, {0: {1, 2}, 3: {1, 2}}),
    "Mixed": ((0, 3), {0: 2, 3: 1}, {0: {1, 2}, 3: {1}}),
    "Intermediate": ((0, 3), {0: 1, 3: 1}, {0: {1}, 3: {1}}),
}

EXPECTED_NULLS = {
    "GN": (0, 1, 2, 3),
    "GA-NS": (),
    "GA-S": (),
    "Pick-H-All": (),
    "Pick-H-Partial": (2, 3),
    "Pick-L-Partial": (1, 2),
    "Mixed": (1, 2),
    "Intermediate": (1, 2),
}


class TestBuiltinCatalog:
    def test_names_and_rates(self):
        scenarios = {s.name: s for s in builtin_scenarios()}
        assert set(scenarios) == set(EXPECTED_RATES)
        for name, (high, low) in EXPECTED_RATES.items():
            assert scenarios[name].high_rates == high, name
            assert scenarios[name].low_rates == low, name

    def test_truth_labels(self):
        for s in builtin_scenarios():
            scored, correct, poc_ok = EXPECTED_TRUTH[s.name]
            assert s.scored == scored, s.name
            for j in scored:
                assert s.correct_final[j] == correct[j], (s.name, j)
                assert set(s.poc_ok[j]) == poc_ok[j], (s.name, j)
            assert s.null_indications == EXPECTED_NULLS[s.name], s.name
            assert s.active_indications == scored, s.name

    def test_lookup_case_insensitive(self):
        assert get_scenario("gn").name == "GN"
        assert get_scenario("pick-h-all").name == "Pick-H-All"
        with pytest.raises(KeyError):
            get_scenario("nope")


class TestScenarioConstruction:
    def test_monotonicity_enforced(self):
        with pytest.raises(ValueError, match="monotone"):
            label_scenario("bad", (0.1, 0.2, 0.1, 0.2), (0.2, 0.2, 0.1, 0.2))

    def test_rate_bounds(self):
        with pytest.raises(ValueError):
            label_scenario("bad", (1.2, 0.2, 0.1, 0.2), (0.2, 0.2, 0.1, 0.2))

    def test_degenerate_zero_rates_allowed(self):
        s = label_scenario("zero", (0.0,) * 4, (0.0,) * 4)
        assert s.null_indications == (0, 1, 2, 3)
        assert s.scored == ()

    def test_dimension_check(self):
        with pytest.raises(ValueError):
            label_scenario("bad", (0.1, 0.2), (0.1, 0.2))

    def test_json_round_trip_with_truth(self):
        s = get_scenario("Mixed")
        loaded = scenario_from_dict(s.to_dict())
        assert loaded == s

    def test_truth_overrides(self):
        d = {
            "name": "custom",
            "true_rates": [[0.4, 0.5, 0.4, 0.5], [0.1, 0.2, 0.1, 0.2]],
            "truth": {"scored": [0, 1], "correct_final": [1, 1, 0, 0]},
        }
        s = scenario_from_dict(d)
        assert s.scored == (0, 1)
        assert s.correct_final == (1, 1, 0, 0)
        with pytest.raises(ValueError, match="unknown truth override"):
            scenario_from_dict({**d, "truth": {"bogus": []}})

    def test_in_between_rate_is_neither_null_nor_active(self):
        # high dose above reference but below target: excluded from both
        # stage-1 error scopes
        s = label_scenario("between", (0.25, 0.2, 0.1, 0.2), (0.1, 0.2, 0.1, 0.2))
        assert 0 not in s.null_indications
        assert 0 not in s.active_indications
