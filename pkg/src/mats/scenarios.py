"""True-rate scenarios for operating-characteristics simulation.

A scenario fixes the true response rate of each (dose, indication) cell and
the ground-truth labels that the error/selection metrics score against. For
the built-in catalog the labels reduce to simple rules against the design's
reference and target rates:

  * an indication is truly active when its DL-H rate reaches the target
    rate, and truly null when that rate is at or below the reference rate;
  * active indications are "scored" for the Perfect/PoC/DO selection
    metrics, with correct decision DL-L when both doses are equally active
    and DL-H otherwise;
  * selecting the low dose only counts toward PoC when the low dose itself
    reaches the target rate.

Custom scenarios may override any of the derived labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .model import ModelConfig, default_config


@dataclass(frozen=True)
class Scenario:
    """True rates plus truth labels for one simulation scenario.

    high_rates / low_rates are the DL-H and DL-L true response rates per
    indication. correct_final[j] is the decision counted as right for scored
    indications; poc_ok[j] is the set of final decisions counted as a PoC
    success there.
    """

    name: str
    high_rates: tuple
    low_rates: tuple
    null_indications: tuple  # truly null at DL-H (Stage-1 Type-I scope)
    active_indications: tuple  # truly active at DL-H (Stage-1 Type-II scope)
    scored: tuple  # indications entering Perfect/PoC/DO
    correct_final: tuple
    poc_ok: tuple

    def __post_init__(self):
        high = tuple(float(p) for p in self.high_rates)
        low = tuple(float(p) for p in self.low_rates)
        object.__setattr__(self, "high_rates", high)
        object.__setattr__(self, "low_rates", low)
        if len(high) != len(low):
            raise ValueError("dose-rate rows must have equal length")
        for ph, pl in zip(high, low):
            if not (0.0 <= pl <= ph <= 1.0):
                raise ValueError(
                    f"rates must satisfy 0 <= low <= high <= 1 (monotone dose-response), got high={ph}, low={pl}"
                )

    @property
    def n_indications(self) -> int:
        return len(self.high_rates)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "true_rates": [list(self.high_rates), list(self.low_rates)],
            "truth": {
                "null_indications": list(self.null_indications),
                "active_indications": list(self.active_indications),
                "scored": list(self.scored),
                "correct_final": list(self.correct_final),
                "poc_ok": [sorted(s) for s in self.poc_ok],
            },
        }


def label_scenario(
    name: str,
    high_rates: Sequence[float],
    low_rates: Sequence[float],
    config: Optional[ModelConfig] = None,
    truth_overrides: Optional[dict] = None,
) -> Scenario:
    """Build a Scenario, deriving truth labels from the design's reference
    and target rates unless explicitly overridden."""
    config = config or default_config()
    if len(high_rates) != config.n_indications:
        raise ValueError(
            f"scenario has {len(high_rates)} indications but the design expects {config.n_indications}"
        )
    high = tuple(float(p) for p in high_rates)
    low = tuple(float(p) for p in low_rates)

    nulls = []
    actives = []
    scored = []
    correct = []
    poc_ok = []
    for j in range(len(high)):
        p0 = config.reference_rates[j]
        p_star = config.target_rates[j]
        high_active = high[j] >= p_star
        low_active = low[j] >= p_star
        if high[j] <= p0:
            nulls.append(j)
        if high_active:
            actives.append(j)
            scored.append(j)
            correct.append(2 if low[j] == high[j] else 1)
            poc_ok.append(frozenset({1, 2}) if low_active else frozenset({1}))
        else:
            correct.append(0)
            poc_ok.append(frozenset())

    labels = {
        "null_indications": tuple(nulls),
        "active_indications": tuple(actives),
        "scored": tuple(scored),
        "correct_final": tuple(correct),
        "poc_ok": tuple(poc_ok),
    }
    if truth_overrides:
        unknown = set(truth_overrides) - set(labels)
        if unknown:
            raise ValueError(f"unknown truth override keys: {sorted(unknown)}")
        for key, value in truth_overrides.items():
            if key == "poc_ok":
                labels[key] = tuple(frozenset(s) for s in value)
            else:
                labels[key] = tuple(value)
    return Scenario(name=name, high_rates=high, low_rates=low, **labels)


_BUILTIN_RATES = {
    # name -> (DL-H row, DL-L row)
    "GN": ((0.1, 0.2, 0.1, 0.2), (0.1, 0.2, 0.1, 0.2)),
    "GA-NS": ((0.4, 0.5, 0.4, 0.5), (0.4, 0.5, 0.4, 0.5)),
    "GA-S": ((0.5, 0.6, 0.5, 0.6), (0.4, 0.5, 0.4, 0.5)),
    "Pick-H-All": ((0.4, 0.5, 0.4, 0.5), (0.1, 0.2, 0.1, 0.2)),
    "Pick-H-Partial": ((0.4, 0.5, 0.1, 0.2), (0.1, 0.2, 0.1, 0.2)),
    "Pick-L-Partial": ((0.4, 0.2, 0.1, 0.5), (0.4, 0.2, 0.1, 0.5)),
    "Mixed": ((0.4, 0.2, 0.1, 0.5), (0.4, 0.2, 0.1, 0.2)),
    "Intermediate": ((0.4, 0.2, 0.1, 0.5), (0.3, 0.2, 0.1, 0.4)),
}


def builtin_scenarios(config: Optional[ModelConfig] = None) -> list:
    """The eight-scenario catalog, labeled against the given design
    (defaults to the standard four-indication design)."""
    config = config or default_config()
    return [label_scenario(name, high, low, config) for name, (high, low) in _BUILTIN_RATES.items()]


def get_scenario(name: str, config: Optional[ModelConfig] = None) -> Scenario:
    """Look up one built-in scenario by name (case-insensitive)."""
    for key, (high, low) in _BUILTIN_RATES.items():
        if key.lower() == name.lower():
            return label_scenario(key, high, low, config)
    raise KeyError(f"unknown scenario {name!r}; built-ins are {', '.join(_BUILTIN_RATES)}")


def scenario_from_dict(d: dict, config: Optional[ModelConfig] = None) -> Scenario:
    """Load a scenario from its JSON form: name, true_rates (2 x J), and
    optional truth overrides."""
    rates = d["true_rates"]
    if len(rates) != 2:
        raise ValueError("true_rates must have exactly two rows (DL-H, DL-L)")
    return label_scenario(
        d.get("name", "custom"),
        rates[0],
        rates[1],
        config,
        truth_overrides=d.get("truth"),
    )
