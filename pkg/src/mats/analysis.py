"""Analysis of an observed (non-simulated) trial dataset.

The interim analysis fits the model on Stage-1 counts and reports the GO/NG
decisions; the final analysis fits on both stages and reports the PoC and
dose-optimization decisions for indications that went on. Simulated and real
trials share this code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .decisions import DecisionRecord, build_record, stage1_decision, stage1_probs
from .mcmc import McmcSettings, PosteriorDraws, sample_posterior
from .model import ModelConfig, TrialData, inv_logit

STAGES = ("interim", "final")


@dataclass(frozen=True)
class ParamSummary:
    mean: float
    sd: float
    q2_5: float
    q97_5: float
    rhat: float
    ess: float

    def to_dict(self) -> dict:
        def finite(v):
            return v if math.isfinite(v) else None

        return {
            "mean": self.mean,
            "sd": self.sd,
            "q2.5": self.q2_5,
            "q97.5": self.q97_5,
            "rhat": finite(self.rhat),
            "ess": finite(self.ess),
        }


@dataclass(frozen=True)
class AnalysisReport:
    """Posterior summaries, decision probabilities and decisions for one
    analysis (interim or final)."""

    stage: str
    posterior_summaries: dict
    decision_probs: dict
    decisions: DecisionRecord
    derived_rates: dict

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "posterior_summaries": {k: v.to_dict() for k, v in self.posterior_summaries.items()},
            "decision_probs": {k: list(v) for k, v in self.decision_probs.items()},
            "decisions": self.decisions.to_dict(),
            "derived_rates": {k: v.to_dict() for k, v in self.derived_rates.items()},
        }


def _summarize(name: str, draws: np.ndarray, diagnostics: dict) -> ParamSummary:
    lo, hi = np.quantile(draws, [0.025, 0.975])
    return ParamSummary(
        mean=float(draws.mean()),
        sd=float(draws.std(ddof=1)) if draws.size > 1 else 0.0,
        q2_5=float(lo),
        q97_5=float(hi),
        rhat=float(diagnostics["rhat"].get(name, float("nan"))),
        ess=float(diagnostics["ess"].get(name, float("nan"))),
    )


def _rate_summaries(draws: PosteriorDraws, config: ModelConfig) -> dict:
    theta0 = config.theta0()
    out = {}
    for j in range(config.n_indications):
        p1 = inv_logit(theta0[j] + draws.eta[:, j])
        p2 = inv_logit(theta0[j] + draws.eta[:, j] - draws.gamma[:, j])
        for label, sample in ((f"p1[{j + 1}]", p1), (f"p2[{j + 1}]", p2)):
            lo, hi = np.quantile(sample, [0.025, 0.975])
            out[label] = ParamSummary(
                mean=float(sample.mean()),
                sd=float(sample.std(ddof=1)) if sample.size > 1 else 0.0,
                q2_5=float(lo),
                q97_5=float(hi),
                rhat=float("nan"),
                ess=float("nan"),
            )
    return out


def analyze(
    data: TrialData,
    config: ModelConfig,
    settings: McmcSettings,
    stage: str,
) -> AnalysisReport:
    """Fit the model and report decisions for the requested analysis stage.

    interim: uses Stage-1 counts only and reports the GO/NG rule results.
    final: requires recorded interim decisions with at least one GO (and its
    Stage-2 data); reports PoC-H / PoC-L / DO indicators and dose selections.
    """
    if stage not in STAGES:
        raise ValueError(f"stage must be one of {STAGES}, got {stage!r}")
    if data.n_indications != config.n_indications:
        raise ValueError(
            f"data has {data.n_indications} indications but the design expects {config.n_indications}"
        )

    if stage == "interim":
        interim = data.stage1_only()
        draws = sample_posterior(interim, config, settings)
        tau1 = config.tau1()
        go = stage1_decision(draws, tau1, config.s1)
        go_probs = stage1_probs(draws, tau1)
        record = build_record(go, go_probs, None, config)
    else:
        if data.stage1_decisions is None or not any(data.stage1_decisions):
            raise ValueError("final analysis requires at least one GO indication with Stage-2 data")
        draws = sample_posterior(data, config, settings)
        go_probs = [None] * config.n_indications  # interim probabilities are not recomputed
        record = build_record(data.stage1_decisions, go_probs, draws, config)

    summaries = {name: _summarize(name, col, draws.diagnostics) for name, col in draws.parameters()}
    return AnalysisReport(
        stage=stage,
        posterior_summaries=summaries,
        decision_probs=record.posterior_probs,
        decisions=record,
        derived_rates=_rate_summaries(draws, config),
    )
