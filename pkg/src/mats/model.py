"""Hierarchical binomial-logit model for the multi-arm two-stage design.

Two dose levels (DL-H, DL-L) are evaluated in J indications. Stage 1 enrolls
DL-H only; indications passing the interim Go/No-Go are randomized between
both doses in Stage 2. On the logit scale, eta_j is the DL-H effect over the
per-indication reference rate and gamma_j > 0 is the DL-H minus DL-L gap, so

    p1_j = inv_logit(logit(p0_j) + eta_j)
    p2_j = inv_logit(logit(p0_j) + eta_j - gamma_j)

and p1_j > p2_j holds in every valid state. eta_j has a normal shrinkage
prior, gamma_j a log-normal one; both prior means and variances carry
normal / inverse-gamma hyper-priors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from typing import Optional, Union

import numpy as np

PROB_FLOOR = 1e-12  # likelihood probabilities are clamped to [floor, 1-floor]

ArrayLike = Union[float, np.ndarray]


def logit(p: ArrayLike) -> ArrayLike:
    """Log-odds log(p / (1 - p)). Domain error outside (0, 1)."""
    arr = np.asarray(p, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError(f"logit requires 0 < p < 1, got {p!r}")
    out = np.log(arr / (1.0 - arr))
    return float(out) if np.isscalar(p) or arr.ndim == 0 else out


def inv_logit(x: ArrayLike) -> ArrayLike:
    """Inverse log-odds 1 / (1 + exp(-x)), strictly increasing into (0, 1)."""
    arr = np.asarray(x, dtype=float)
    out = np.where(arr >= 0, 1.0 / (1.0 + np.exp(-arr)), np.exp(arr) / (1.0 + np.exp(arr)))
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def compute_tau1(p0: float, p1_star: float) -> float:
    """Efficacy margin on the logit scale: logit((p1*+p0)/2) - logit(p0).

    p1_star is the target response rate, p0 the reference rate; the margin is
    the log-odds gap between their midpoint and the reference.
    """
    if not (0.0 < p0 < 1.0 and 0.0 < p1_star < 1.0):
        raise ValueError("p0 and p1_star must lie in (0, 1)")
    if p1_star <= p0:
        raise ValueError(f"target rate must exceed reference rate, got p0={p0}, p1_star={p1_star}")
    return logit((p1_star + p0) / 2.0) - logit(p0)


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class HyperPriors:
    """Hyper-prior constants: eta0 ~ N(mu_eta0, sigma2_eta0),
    sigma2_eta ~ InvGamma(alpha_eta, beta_eta), and likewise for gamma."""

    mu_eta0: float = 0.0
    sigma2_eta0: float = 1.0
    alpha_eta: float = 10.0
    beta_eta: float = 1.0
    mu_gamma0: float = 0.0
    sigma2_gamma0: float = 1.0
    alpha_gamma: float = 2.0
    beta_gamma: float = 1.0

    def __post_init__(self):
        for name in ("sigma2_eta0", "alpha_eta", "beta_eta", "sigma2_gamma0", "alpha_gamma", "beta_gamma"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"hyper-prior {name} must be > 0")


@dataclass(frozen=True)
class SamplePlan:
    """Planned enrollment per indication: Stage-1 DL-H arm, then Stage-2
    DL-H and DL-L arms (per indication, entered only on a GO)."""

    stage1: tuple
    stage2_high: tuple
    stage2_low: tuple

    def __post_init__(self):
        object.__setattr__(self, "stage1", tuple(int(n) for n in self.stage1))
        object.__setattr__(self, "stage2_high", tuple(int(n) for n in self.stage2_high))
        object.__setattr__(self, "stage2_low", tuple(int(n) for n in self.stage2_low))
        if not (len(self.stage1) == len(self.stage2_high) == len(self.stage2_low)):
            raise ValueError("sample plan vectors must have equal length")
        for arm in (self.stage1, self.stage2_high, self.stage2_low):
            if any(n <= 0 for n in arm):
                raise ValueError("all planned sample sizes must be positive")


@dataclass(frozen=True)
class ModelConfig:
    """Complete design specification: rates, thresholds, margins, priors, plan.

    Thresholds s1 (interim GO), s2 (DL-H PoC), t2 (DL-L PoC) and w2 (dose
    optimization) gate the corresponding posterior probabilities; tau2 is the
    logit-scale dose gap that must be exceeded for the high dose to be
    declared superior.
    """

    reference_rates: tuple
    target_rates: tuple
    s1: float = 0.5
    s2: float = 0.5
    t2: float = 0.5
    w2: float = 0.5
    tau2: float = 0.4
    hyper: HyperPriors = field(default_factory=HyperPriors)
    sample_plan: Optional[SamplePlan] = None

    def __post_init__(self):
        ref = tuple(float(p) for p in self.reference_rates)
        tgt = tuple(float(p) for p in self.target_rates)
        object.__setattr__(self, "reference_rates", ref)
        object.__setattr__(self, "target_rates", tgt)
        if len(ref) == 0:
            raise ValueError("need at least one indication")
        if len(ref) != len(tgt):
            raise ValueError("reference_rates and target_rates must have equal length")
        for p in ref + tgt:
            if not (0.0 < p < 1.0):
                raise ValueError(f"rates must lie strictly inside (0, 1), got {p}")
        for p0, p1 in zip(ref, tgt):
            if p1 <= p0:
                raise ValueError(f"target rate {p1} must exceed reference rate {p0}")
        for name in ("s1", "s2", "t2", "w2"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ValueError(f"threshold {name} must lie in (0, 1), got {v}")
        if self.tau2 <= 0.0:
            raise ValueError("tau2 must be > 0")
        if self.sample_plan is None:
            n = len(ref)
            object.__setattr__(self, "sample_plan", SamplePlan((20,) * n, (20,) * n, (20,) * n))
        if len(self.sample_plan.stage1) != len(ref):
            raise ValueError("sample plan length must match number of indications")

    @property
    def n_indications(self) -> int:
        return len(self.reference_rates)

    def tau1(self) -> tuple:
        """Per-indication efficacy margins tau1_j."""
        return tuple(compute_tau1(p0, p1) for p0, p1 in zip(self.reference_rates, self.target_rates))

    def theta0(self) -> np.ndarray:
        """Reference log-odds logit(p0_j)."""
        return np.array([logit(p) for p in self.reference_rates])

    def to_dict(self) -> dict:
        return {
            "n_indications": self.n_indications,
            "reference_rates": list(self.reference_rates),
            "target_rates": list(self.target_rates),
            "thresholds": {"s1": self.s1, "s2": self.s2, "t2": self.t2, "w2": self.w2},
            "tau2": self.tau2,
            "hyper": asdict(self.hyper),
            "sample_plan": {
                "stage1": list(self.sample_plan.stage1),
                "stage2_high": list(self.sample_plan.stage2_high),
                "stage2_low": list(self.sample_plan.stage2_low),
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        thresholds = d.get("thresholds", {})
        kwargs = {}
        for k in ("s1", "s2", "t2", "w2"):
            if k in thresholds:
                kwargs[k] = float(thresholds[k])
        if "tau2" in d:
            kwargs["tau2"] = float(d["tau2"])
        if "hyper" in d:
            kwargs["hyper"] = HyperPriors(**{k: float(v) for k, v in d["hyper"].items()})
        if "sample_plan" in d:
            sp = d["sample_plan"]
            kwargs["sample_plan"] = SamplePlan(sp["stage1"], sp["stage2_high"], sp["stage2_low"])
        cfg = cls(reference_rates=tuple(d["reference_rates"]), target_rates=tuple(d["target_rates"]), **kwargs)
        if "n_indications" in d and int(d["n_indications"]) != cfg.n_indications:
            raise ValueError("n_indications does not match the rate vectors")
        return cfg

    def digest(self) -> str:
        """Short stable hash of the canonical JSON form."""
        import hashlib

        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def default_config() -> ModelConfig:
    """Four-indication default design: p0 = (.1,.2,.1,.2), p1* = (.4,.5,.4,.5),
    all thresholds 0.5, tau2 = 0.4, 20 per dose/indication/stage."""
    return ModelConfig(
        reference_rates=(0.1, 0.2, 0.1, 0.2),
        target_rates=(0.4, 0.5, 0.4, 0.5),
    )


# ---------------------------------------------------------------------------
# trial data


@dataclass(frozen=True)
class StageTwoCounts:
    """Stage-2 responder/enrolled counts for one indication's two arms."""

    high_responders: int
    high_enrolled: int
    low_responders: int
    low_enrolled: int

    def __post_init__(self):
        for y, n in ((self.high_responders, self.high_enrolled), (self.low_responders, self.low_enrolled)):
            if n < 0 or y < 0 or y > n:
                raise ValueError(f"counts must satisfy 0 <= responders <= enrolled, got {y}/{n}")


@dataclass(frozen=True)
class TrialData:
    """Observed counts: Stage-1 (y, n) per indication, the recorded interim
    decisions, and Stage-2 two-arm counts for indications that went on.

    stage2[j] must be present exactly when stage1_decisions[j] == 1;
    stage1_decisions is None for an interim-only dataset (and then no
    stage2 entries are allowed).
    """

    stage1_responders: tuple
    stage1_enrolled: tuple
    stage1_decisions: Optional[tuple] = None
    stage2: Optional[tuple] = None

    def __post_init__(self):
        ys = tuple(int(y) for y in self.stage1_responders)
        ns = tuple(int(n) for n in self.stage1_enrolled)
        object.__setattr__(self, "stage1_responders", ys)
        object.__setattr__(self, "stage1_enrolled", ns)
        if len(ys) != len(ns):
            raise ValueError("stage-1 responder and enrollment vectors must have equal length")
        for y, n in zip(ys, ns):
            if n < 0 or y < 0 or y > n:
                raise ValueError(f"counts must satisfy 0 <= responders <= enrolled, got {y}/{n}")
        if self.stage1_decisions is not None:
            dec = tuple(int(d) for d in self.stage1_decisions)
            object.__setattr__(self, "stage1_decisions", dec)
            if len(dec) != len(ys):
                raise ValueError("stage1_decisions length mismatch")
            if any(d not in (0, 1) for d in dec):
                raise ValueError("stage-1 decisions must be 0 or 1")
        if self.stage2 is not None:
            s2 = tuple(self.stage2)
            object.__setattr__(self, "stage2", s2)
            if len(s2) != len(ys):
                raise ValueError("stage2 length mismatch")
            if self.stage1_decisions is None:
                if any(c is not None for c in s2):
                    raise ValueError("stage-2 data require recorded stage-1 decisions")
            else:
                for j, (d, c) in enumerate(zip(self.stage1_decisions, s2)):
                    if (c is not None) != (d == 1):
                        raise ValueError(
                            f"indication {j + 1}: stage-2 data must be present exactly when the stage-1 decision is GO"
                        )
        elif self.stage1_decisions is not None and any(self.stage1_decisions):
            raise ValueError("GO indications must carry stage-2 data")

    @property
    def n_indications(self) -> int:
        return len(self.stage1_responders)

    def stage1_only(self) -> "TrialData":
        """The interim view: Stage-1 counts, no decisions, no Stage-2 data."""
        return TrialData(self.stage1_responders, self.stage1_enrolled)

    def arrays(self):
        """Float arrays (y1, n1, yh2, nh2, yl2, nl2); absent Stage-2 cells
        are (0, 0) and contribute nothing to the likelihood."""
        j = self.n_indications
        y1 = np.array(self.stage1_responders, dtype=float)
        n1 = np.array(self.stage1_enrolled, dtype=float)
        yh2 = np.zeros(j)
        nh2 = np.zeros(j)
        yl2 = np.zeros(j)
        nl2 = np.zeros(j)
        if self.stage2 is not None:
            for i, cell in enumerate(self.stage2):
                if cell is not None:
                    yh2[i] = cell.high_responders
                    nh2[i] = cell.high_enrolled
                    yl2[i] = cell.low_responders
                    nl2[i] = cell.low_enrolled
        return y1, n1, yh2, nh2, yl2, nl2

    def to_dict(self) -> dict:
        d = {
            "stage1": [
                {"responders": y, "enrolled": n}
                for y, n in zip(self.stage1_responders, self.stage1_enrolled)
            ]
        }
        if self.stage1_decisions is not None:
            d["stage1_decisions"] = list(self.stage1_decisions)
        if self.stage2 is not None:
            d["stage2"] = [
                None
                if c is None
                else {
                    "high": {"responders": c.high_responders, "enrolled": c.high_enrolled},
                    "low": {"responders": c.low_responders, "enrolled": c.low_enrolled},
                }
                for c in self.stage2
            ]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrialData":
        ys = tuple(cell["responders"] for cell in d["stage1"])
        ns = tuple(cell["enrolled"] for cell in d["stage1"])
        decisions = tuple(d["stage1_decisions"]) if "stage1_decisions" in d else None
        stage2 = None
        if "stage2" in d and d["stage2"] is not None:
            stage2 = tuple(
                None
                if c is None
                else StageTwoCounts(
                    c["high"]["responders"],
                    c["high"]["enrolled"],
                    c["low"]["responders"],
                    c["low"]["enrolled"],
                )
                for c in d["stage2"]
            )
        return cls(ys, ns, decisions, stage2)


# ---------------------------------------------------------------------------
# model state and joint density


@dataclass(frozen=True)
class ModelState:
    """One point in parameter space. gamma entries must be positive to lie
    inside the log-normal support; log_joint returns -inf otherwise."""

    eta: tuple
    gamma: tuple
    eta0: float
    sigma2_eta: float
    gamma0: float
    sigma2_gamma: float

    def __post_init__(self):
        object.__setattr__(self, "eta", tuple(float(v) for v in self.eta))
        object.__setattr__(self, "gamma", tuple(float(v) for v in self.gamma))
        if len(self.eta) != len(self.gamma):
            raise ValueError("eta and gamma must have equal length")

    @property
    def n_indications(self) -> int:
        return len(self.eta)

    def response_rates(self, config: ModelConfig):
        """Derived (p1, p2) per indication for this state."""
        theta0 = config.theta0()
        eta = np.array(self.eta)
        gamma = np.array(self.gamma)
        p1 = inv_logit(theta0 + eta)
        p2 = inv_logit(theta0 + eta - gamma)
        return p1, p2


def _norm_logpdf(x: float, mean: float, var: float) -> float:
    return -0.5 * math.log(2.0 * math.pi * var) - (x - mean) ** 2 / (2.0 * var)


def _lognorm_logpdf(x: float, mu: float, var: float) -> float:
    if x <= 0.0:
        return -math.inf
    lx = math.log(x)
    return -lx - 0.5 * math.log(2.0 * math.pi * var) - (lx - mu) ** 2 / (2.0 * var)


def _invgamma_logpdf(x: float, alpha: float, beta: float) -> float:
    if x <= 0.0:
        return -math.inf
    return alpha * math.log(beta) - math.lgamma(alpha) - (alpha + 1.0) * math.log(x) - beta / x


def _binom_logpmf(y: float, n: float, p: float) -> float:
    p = min(max(p, PROB_FLOOR), 1.0 - PROB_FLOOR)
    return (
        math.lgamma(n + 1.0)
        - math.lgamma(y + 1.0)
        - math.lgamma(n - y + 1.0)
        + y * math.log(p)
        + (n - y) * math.log1p(-p)
    )


def log_joint(state: ModelState, data: TrialData, config: ModelConfig) -> float:
    """Natural-log joint density of the full hierarchy at `state`.

    Includes binomial normalizing constants (constant offsets that cancel in
    Metropolis ratios but make direct density comparisons exact). Returns
    -inf outside the support (any gamma_j <= 0 or variance <= 0).
    """
    if state.n_indications != config.n_indications or data.n_indications != config.n_indications:
        raise ValueError("state/data/config dimensions do not match")
    if state.sigma2_eta <= 0.0 or state.sigma2_gamma <= 0.0 or any(g <= 0.0 for g in state.gamma):
        return -math.inf

    h = config.hyper
    theta0 = config.theta0()
    y1, n1, yh2, nh2, yl2, nl2 = data.arrays()

    total = 0.0
    for j in range(config.n_indications):
        th1 = theta0[j] + state.eta[j]
        p1 = inv_logit(th1)
        p2 = inv_logit(th1 - state.gamma[j])
        total += _binom_logpmf(y1[j], n1[j], p1)
        total += _binom_logpmf(yh2[j], nh2[j], p1)
        total += _binom_logpmf(yl2[j], nl2[j], p2)
        total += _norm_logpdf(state.eta[j], state.eta0, state.sigma2_eta)
        total += _lognorm_logpdf(state.gamma[j], state.gamma0, state.sigma2_gamma)
    total += _norm_logpdf(state.eta0, h.mu_eta0, h.sigma2_eta0)
    total += _invgamma_logpdf(state.sigma2_eta, h.alpha_eta, h.beta_eta)
    total += _norm_logpdf(state.gamma0, h.mu_gamma0, h.sigma2_gamma0)
    total += _invgamma_logpdf(state.sigma2_gamma, h.alpha_gamma, h.beta_gamma)
    return total
