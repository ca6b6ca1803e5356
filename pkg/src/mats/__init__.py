"""Multi-arm two-stage Bayesian design engine.

Hierarchical binomial-logit model over doses x indications x stages, fitted
by Metropolis-within-Gibbs MCMC; interim Go/No-Go and final proof-of-concept
plus dose-optimization rules; dose-gap threshold calibration; and a trial
simulator for operating characteristics. See the CLI (`mats`) and the HTTP
service (`mats serve`) for the user-facing surfaces.
"""

from .analysis import AnalysisReport, analyze
from .calibration import CalibrationRequest, calibrate_tau2, curve_points, delta_from_tau2
from .decisions import (
    DecisionRecord,
    final_dose_selection,
    stage1_decision,
    stage2_indicators,
)
from .mcmc import FixedHypers, McmcSettings, PosteriorDraws, sample_posterior
from .model import (
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
from .scenarios import Scenario, builtin_scenarios, get_scenario, label_scenario
from .simulate import (
    OperatingCharacteristics,
    aggregate_records,
    run_operating_characteristics,
    simulate_trial,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "CalibrationRequest",
    "DecisionRecord",
    "FixedHypers",
    "HyperPriors",
    "McmcSettings",
    "ModelConfig",
    "ModelState",
    "OperatingCharacteristics",
    "PosteriorDraws",
    "SamplePlan",
    "Scenario",
    "StageTwoCounts",
    "TrialData",
    "aggregate_records",
    "analyze",
    "builtin_scenarios",
    "calibrate_tau2",
    "compute_tau1",
    "curve_points",
    "default_config",
    "delta_from_tau2",
    "final_dose_selection",
    "get_scenario",
    "inv_logit",
    "label_scenario",
    "log_joint",
    "logit",
    "run_operating_characteristics",
    "sample_posterior",
    "simulate_trial",
    "stage1_decision",
    "stage2_indicators",
]
