"""Whole-trial simulation and operating-characteristics aggregation.

Each replicate draws Stage-1 responder counts from the scenario's true DL-H
rates, fits the posterior, applies the interim rule, then (for GO
indications) draws the randomized Stage-2 counts, refits on the combined
data and applies the final rules.

Reproducibility: replicate r derives its RNG streams from
SeedSequence([master_seed, r]) only, and replicates are processed in
fixed-size chunks whose boundaries do not depend on the worker count, so a
run is bit-identical across repeats and across any degree of parallelism.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Optional, Union

import numpy as np

from .decisions import DecisionRecord, build_record, stage1_decision, stage1_probs
from .mcmc import McmcSettings, sample_posterior
from .model import ModelConfig, StageTwoCounts, TrialData
from .scenarios import Scenario

CHUNK_SIZE = 25  # replicates per worker task; fixed so results never depend on worker count


def replicate_seed_sequence(master_seed: int, replicate_index: int) -> np.random.SeedSequence:
    """Independent, reproducible per-replicate seed root."""
    return np.random.SeedSequence([int(master_seed), int(replicate_index)])


def derive_replicate_seeds(replicate_seed: Union[int, np.random.SeedSequence]):
    """(data_seed, interim_fit_seed, final_fit_seed) for one replicate."""
    ss = (
        replicate_seed
        if isinstance(replicate_seed, np.random.SeedSequence)
        else np.random.SeedSequence(int(replicate_seed))
    )
    return tuple(int(s) for s in ss.generate_state(3, dtype=np.uint64))


def simulate_trial(
    scenario: Scenario,
    config: ModelConfig,
    settings: McmcSettings,
    replicate_seed: Union[int, np.random.SeedSequence],
) -> tuple:
    """Run one complete trial under the scenario's true rates.

    Returns (TrialData, DecisionRecord): the simulated counts for both
    stages and every decision plus the posterior probabilities behind them.
    """
    if scenario.n_indications != config.n_indications:
        raise ValueError("scenario and design disagree on the number of indications")
    data_seed, interim_seed, final_seed = derive_replicate_seeds(replicate_seed)
    rng = np.random.default_rng(data_seed)
    plan = config.sample_plan

    y1 = rng.binomial(plan.stage1, scenario.high_rates)
    interim_data = TrialData(tuple(int(y) for y in y1), plan.stage1)
    draws1 = sample_posterior(interim_data, config, replace(settings, seed=interim_seed))
    tau1 = config.tau1()
    go = stage1_decision(draws1, tau1, config.s1)
    go_probs = stage1_probs(draws1, tau1)

    if not any(go):
        data = TrialData(interim_data.stage1_responders, plan.stage1, go, (None,) * len(go))
        return data, build_record(go, go_probs, None, config)

    stage2 = []
    for j, d in enumerate(go):
        if d == 1:
            yh = int(rng.binomial(plan.stage2_high[j], scenario.high_rates[j]))
            yl = int(rng.binomial(plan.stage2_low[j], scenario.low_rates[j]))
            stage2.append(StageTwoCounts(yh, plan.stage2_high[j], yl, plan.stage2_low[j]))
        else:
            stage2.append(None)
    data = TrialData(interim_data.stage1_responders, plan.stage1, go, tuple(stage2))
    draws12 = sample_posterior(data, config, replace(settings, seed=final_seed))
    return data, build_record(go, go_probs, draws12, config)


# ---------------------------------------------------------------------------
# aggregation


@dataclass(frozen=True)
class OperatingCharacteristics:
    """Per-scenario aggregates over replicates.

    Family-wise Stage-1 errors are None when the scenario has no null
    (respectively no active) indication; the Stage-2 family-wise Type-I rate
    is reported only for global-null scenarios; Perfect/PoC/DO only when the
    scenario scores at least one indication. Per-indication entries carry a
    companion kind ("type_i" for null indications, "type_ii" for active
    ones, None for in-between truth).
    """

    scenario: str
    stage1_type1_fw: Optional[float]
    stage1_type2_fw: Optional[float]
    stage2_type1_fw: Optional[float]
    perfect: Optional[float]
    poc: Optional[float]
    do_metric: Optional[float]
    by_indication_stage1_errors: tuple
    by_indication_error_kind: tuple
    avg_sample_size: tuple
    go_rate: tuple
    n_replicates: int
    seed: int
    config_digest: str

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "stage1_type1_fw": self.stage1_type1_fw,
            "stage1_type2_fw": self.stage1_type2_fw,
            "stage2_type1_fw": self.stage2_type1_fw,
            "perfect": self.perfect,
            "poc": self.poc,
            "do": self.do_metric,
            "by_indication_stage1_errors": list(self.by_indication_stage1_errors),
            "by_indication_error_kind": list(self.by_indication_error_kind),
            "avg_sample_size": list(self.avg_sample_size),
            "go_rate": list(self.go_rate),
            "n_replicates": self.n_replicates,
            "seed": self.seed,
            "config_digest": self.config_digest,
        }

    def csv_rows(self) -> list:
        """Flat (scenario, metric, indication, value) rows; indication is
        empty for trial-level metrics."""
        rows = []
        for metric in ("stage1_type1_fw", "stage1_type2_fw", "stage2_type1_fw", "perfect", "poc"):
            rows.append((self.scenario, metric, "", getattr(self, metric)))
        rows.append((self.scenario, "do", "", self.do_metric))
        for j in range(len(self.go_rate)):
            kind = self.by_indication_error_kind[j]
            if kind is not None:
                rows.append((self.scenario, f"stage1_{kind}", str(j + 1), self.by_indication_stage1_errors[j]))
            rows.append((self.scenario, "avg_sample_size", str(j + 1), self.avg_sample_size[j]))
            rows.append((self.scenario, "go_rate", str(j + 1), self.go_rate[j]))
        return rows


def aggregate_records(
    scenario: Scenario,
    config: ModelConfig,
    records: Iterable[DecisionRecord],
    seed: int,
) -> OperatingCharacteristics:
    """Pure fold of per-replicate decisions into the summary metrics.

    Re-running this over persisted replicate records reproduces the summary
    exactly; nothing here depends on simulation internals.
    """
    j_count = scenario.n_indications
    n = 0
    go_counts = np.zeros(j_count, dtype=np.int64)
    any_null_go = 0
    any_active_ng = 0
    any_select_fw = 0
    perfect_count = 0
    poc_count = 0
    do_count = 0

    nulls = set(scenario.null_indications)
    actives = set(scenario.active_indications)
    scored = list(scenario.scored)
    all_null = len(nulls) == j_count

    for rec in records:
        if rec.n_indications != j_count:
            raise ValueError("decision record does not match the scenario's indication count")
        n += 1
        sel = [f if f is not None else 0 for f in rec.final]
        for j in range(j_count):
            go_counts[j] += rec.go_stage1[j]
        if any(rec.go_stage1[j] == 1 for j in nulls):
            any_null_go += 1
        if any(rec.go_stage1[j] == 0 for j in actives):
            any_active_ng += 1
        if all_null and any(s in (1, 2) for s in sel):
            any_select_fw += 1
        if scored:
            if all(sel[j] == scenario.correct_final[j] for j in scored):
                perfect_count += 1
            if any(sel[j] in scenario.poc_ok[j] for j in scored):
                poc_count += 1
            if any(sel[j] == scenario.correct_final[j] for j in scored):
                do_count += 1

    if n == 0:
        raise ValueError("no replicate records to aggregate")

    go_rate = tuple(float(c) / n for c in go_counts)
    plan = config.sample_plan
    # identical to the per-replicate mean because enrollment is a fixed plan
    avg_n = tuple(
        plan.stage1[j] + (plan.stage2_high[j] + plan.stage2_low[j]) * go_rate[j]
        for j in range(j_count)
    )
    per_ind = []
    kinds = []
    for j in range(j_count):
        if j in nulls:
            per_ind.append(go_rate[j])
            kinds.append("type_i")
        elif j in actives:
            per_ind.append(1.0 - go_rate[j])
            kinds.append("type_ii")
        else:
            per_ind.append(None)
            kinds.append(None)

    return OperatingCharacteristics(
        scenario=scenario.name,
        stage1_type1_fw=any_null_go / n if nulls else None,
        stage1_type2_fw=any_active_ng / n if actives else None,
        stage2_type1_fw=any_select_fw / n if all_null else None,
        perfect=perfect_count / n if scored else None,
        poc=poc_count / n if scored else None,
        do_metric=do_count / n if scored else None,
        by_indication_stage1_errors=tuple(per_ind),
        by_indication_error_kind=tuple(kinds),
        avg_sample_size=avg_n,
        go_rate=go_rate,
        n_replicates=n,
        seed=int(seed),
        config_digest=config.digest(),
    )


# ---------------------------------------------------------------------------
# replication harness


def _run_chunk(scenario, config, settings, master_seed, start, stop):
    rows = []
    for r in range(start, stop):
        data, record = simulate_trial(scenario, config, settings, replicate_seed_sequence(master_seed, r))
        rows.append({"replicate": r, "data": data.to_dict(), "decisions": record.to_dict()})
    return rows


def run_operating_characteristics(
    scenario: Scenario,
    config: ModelConfig,
    settings: McmcSettings,
    n_replicates: int,
    master_seed: int,
    *,
    n_workers: int = 1,
    out_dir: Optional[Union[str, Path]] = None,
    progress_callback: Optional[Callable[[int, int], None]] = None,
) -> OperatingCharacteristics:
    """Simulate n_replicates independent trials and aggregate their metrics.

    When out_dir is given, per-replicate records are persisted to
    replicates.jsonl before aggregation so metrics can be audited and
    recomputed. progress_callback receives (completed, total) replicate
    counts as chunks finish (monotone, called from this thread).
    """
    if n_replicates < 1:
        raise ValueError("n_replicates must be >= 1")
    if n_workers < 1:
        raise ValueError("n_workers must be >= 1")

    bounds = [(s, min(s + CHUNK_SIZE, n_replicates)) for s in range(0, n_replicates, CHUNK_SIZE)]
    chunk_rows: list = [None] * len(bounds)
    completed = 0
    if n_workers == 1 or len(bounds) == 1:
        for i, (start, stop) in enumerate(bounds):
            chunk_rows[i] = _run_chunk(scenario, config, settings, master_seed, start, stop)
            completed += stop - start
            if progress_callback:
                progress_callback(completed, n_replicates)
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            futures = {
                pool.submit(_run_chunk, scenario, config, settings, master_seed, start, stop): i
                for i, (start, stop) in enumerate(bounds)
            }
            for fut in as_completed(futures):
                i = futures[fut]
                chunk_rows[i] = fut.result()
                completed += bounds[i][1] - bounds[i][0]
                if progress_callback:
                    progress_callback(completed, n_replicates)

    rows = [row for chunk in chunk_rows for row in chunk]
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "replicates.jsonl", "w") as fh:
            for row in rows:
                fh.write(json.dumps(row) + "\n")

    records = (DecisionRecord.from_dict(row["decisions"]) for row in rows)
    return aggregate_records(scenario, config, records, master_seed)


def load_replicate_records(path: Union[str, Path]) -> list:
    """Read persisted replicate rows back (for audits and `report`)."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows
