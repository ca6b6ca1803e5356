"""Stagewise decision rules over posterior draws.

All posterior probabilities are plain draw fractions of inclusive events
(eta_j >= tau1_j etc.); all threshold comparisons are strict. A fraction that
lands exactly on its threshold is therefore a negative decision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .mcmc import PosteriorDraws
from .model import ModelConfig


@dataclass(frozen=True)
class DecisionRecord:
    """Per-indication decisions and the posterior probabilities behind them.

    final[j] is 0 (no dose), 1 (DL-H) or 2 (DL-L). Once a final analysis has
    been run, it is present exactly for indications that passed Stage 1; in
    an interim-only record every final entry is None. Stage-2 indicators and
    probabilities are None wherever no Stage-2 analysis applies. `warnings`
    flags anomalies such as the low dose passing PoC while the high dose
    fails, which contradicts the monotone dose-response assumption.
    """

    go_stage1: tuple
    poc_high: tuple
    poc_low: tuple
    do_flag: tuple
    final: tuple
    posterior_probs: dict
    warnings: tuple = ()

    def __post_init__(self):
        if any(f is not None for f in self.final):
            for j, (d, f) in enumerate(zip(self.go_stage1, self.final)):
                if (f is not None) != (d == 1):
                    raise ValueError(
                        f"indication {j + 1}: final decision must be present exactly for GO indications"
                    )

    @property
    def n_indications(self) -> int:
        return len(self.go_stage1)

    def to_dict(self) -> dict:
        return {
            "go_stage1": list(self.go_stage1),
            "poc_high": list(self.poc_high),
            "poc_low": list(self.poc_low),
            "do_flag": list(self.do_flag),
            "final": list(self.final),
            "posterior_probs": {k: list(v) for k, v in self.posterior_probs.items()},
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionRecord":
        return cls(
            go_stage1=tuple(d["go_stage1"]),
            poc_high=tuple(d["poc_high"]),
            poc_low=tuple(d["poc_low"]),
            do_flag=tuple(d["do_flag"]),
            final=tuple(d["final"]),
            posterior_probs={k: tuple(v) for k, v in d["posterior_probs"].items()},
            warnings=tuple(d.get("warnings", ())),
        )


def _require_draws(draws: PosteriorDraws) -> None:
    if draws.n_draws == 0:
        raise ValueError("cannot decide from an empty posterior sample")


def stage1_probs(draws: PosteriorDraws, tau1: Sequence[float]) -> np.ndarray:
    """P(eta_j >= tau1_j | data) as draw fractions."""
    _require_draws(draws)
    return (draws.eta >= np.asarray(tau1)).mean(axis=0)


def stage1_decision(draws: PosteriorDraws, tau1: Sequence[float], s1: float) -> tuple:
    """Interim GO/No-Go: GO (1) iff the efficacy probability strictly exceeds s1."""
    probs = stage1_probs(draws, tau1)
    return tuple(int(p > s1) for p in probs)


def stage2_probs(draws: PosteriorDraws, tau1: Sequence[float], tau2: float):
    """The three final-analysis probabilities per indication:
    P(eta_j >= tau1_j), P(eta_j - gamma_j >= tau1_j), P(gamma_j >= tau2)."""
    _require_draws(draws)
    tau1 = np.asarray(tau1)
    p_high = (draws.eta >= tau1).mean(axis=0)
    p_low = (draws.eta - draws.gamma >= tau1).mean(axis=0)
    p_gap = (draws.gamma >= tau2).mean(axis=0)
    return p_high, p_low, p_gap


def stage2_indicators(
    draws: PosteriorDraws,
    tau1: Sequence[float],
    tau2: float,
    s2: float,
    t2: float,
    w2: float,
) -> list:
    """(POC-H, POC-L, DO) triples per indication, each 1 iff its posterior
    probability strictly exceeds the matching threshold. Meaningful only for
    indications that entered Stage 2; callers mask the rest."""
    p_high, p_low, p_gap = stage2_probs(draws, tau1, tau2)
    return [
        (int(ph > s2), int(pl > t2), int(pg > w2))
        for ph, pl, pg in zip(p_high, p_low, p_gap)
    ]


def final_dose_selection(poc_h: int, poc_l: int, do_flag: int) -> int:
    """Map the three Stage-2 indicators to the dose decision.

    Neither dose shows PoC -> 0. High dose shows PoC and is either superior
    or the only one with PoC -> 1. Otherwise -> 2 (low dose): both doses show
    PoC without superiority, or only the low dose does.
    """
    if poc_h == 0 and poc_l == 0:
        return 0
    if poc_h == 1 and poc_l == 1 and do_flag == 1:
        return 1
    if poc_h == 1 and poc_l == 0:
        return 1
    return 2


def build_record(
    go: Sequence[int],
    go_probs: Sequence[float],
    draws12: Optional[PosteriorDraws],
    config: ModelConfig,
) -> DecisionRecord:
    """Assemble the full DecisionRecord from interim results plus (when any
    indication went on) the final-analysis posterior."""
    j = len(go)
    poc_h: list = [None] * j
    poc_l: list = [None] * j
    do_f: list = [None] * j
    final: list = [None] * j
    p_h: list = [None] * j
    p_l: list = [None] * j
    p_g: list = [None] * j
    warn = []
    if draws12 is not None:
        tau1 = config.tau1()
        ph, pl, pg = stage2_probs(draws12, tau1, config.tau2)
        triples = stage2_indicators(draws12, tau1, config.tau2, config.s2, config.t2, config.w2)
        for i in range(j):
            if go[i] != 1:
                continue
            poc_h[i], poc_l[i], do_f[i] = triples[i]
            final[i] = final_dose_selection(*triples[i])
            p_h[i], p_l[i], p_g[i] = float(ph[i]), float(pl[i]), float(pg[i])
            if poc_l[i] == 1 and poc_h[i] == 0:
                warn.append(
                    f"indication {i + 1}: low dose passed PoC while high dose failed, "
                    "contradicting the monotone dose-response assumption"
                )
    return DecisionRecord(
        go_stage1=tuple(int(d) for d in go),
        poc_high=tuple(poc_h),
        poc_low=tuple(poc_l),
        do_flag=tuple(do_f),
        final=tuple(final),
        posterior_probs={
            "go": tuple(float(p) if p is not None else None for p in go_probs),
            "poc_high": tuple(p_h),
            "poc_low": tuple(p_l),
            "do": tuple(p_g),
        },
        warnings=tuple(warn),
    )
