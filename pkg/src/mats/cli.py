"""Command-line interface.

Subcommands: simulate (operating characteristics), report (re-aggregate a
finished run), analyze (interim/final analysis of observed counts),
calibrate-tau2, scenarios, serve (HTTP service).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import calibration as calib
from .analysis import analyze
from .decisions import DecisionRecord
from .mcmc import McmcSettings
from .model import ModelConfig, TrialData, default_config
from .scenarios import builtin_scenarios, get_scenario, scenario_from_dict
from .simulate import (
    aggregate_records,
    load_replicate_records,
    run_operating_characteristics,
)


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _load_config(path) -> ModelConfig:
    return ModelConfig.from_dict(_load_json(path)) if path else default_config()


def _load_scenario(spec: str, config: ModelConfig):
    if os.path.exists(spec):
        return scenario_from_dict(_load_json(spec), config)
    return get_scenario(spec, config)


def _oc_csv(ocs) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["scenario", "metric", "indication", "value"])
    for oc in ocs:
        for row in oc.csv_rows():
            writer.writerow(["" if v is None else v for v in row])
    return buf.getvalue()


def _fmt(value, digits=4) -> str:
    return "NA" if value is None else f"{value:.{digits}f}"


def _print_oc(oc) -> None:
    print(f"scenario: {oc.scenario}   replicates: {oc.n_replicates}   seed: {oc.seed}")
    print(f"  stage-1 family-wise type I:  {_fmt(oc.stage1_type1_fw)}")
    print(f"  stage-1 family-wise type II: {_fmt(oc.stage1_type2_fw)}")
    print(f"  stage-2 family-wise type I:  {_fmt(oc.stage2_type1_fw)}")
    print(f"  perfect: {_fmt(oc.perfect)}   poc: {_fmt(oc.poc)}   do: {_fmt(oc.do_metric)}")
    for j in range(len(oc.go_rate)):
        kind = oc.by_indication_error_kind[j]
        err = f"{kind}={_fmt(oc.by_indication_stage1_errors[j])}" if kind else "no error label"
        print(
            f"  indication {j + 1}: go_rate={oc.go_rate[j]:.4f}  avg_n={oc.avg_sample_size[j]:.2f}  {err}"
        )


def _cmd_simulate(args) -> int:
    config = _load_config(args.config)
    scenario = _load_scenario(args.scenario, config)
    settings = McmcSettings(
        n_iterations=args.iterations, burn_in=args.burn_in, seed=args.seed
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "run.json", "w") as fh:
        json.dump(
            {
                "scenario": scenario.to_dict(),
                "config": config.to_dict(),
                "settings": {
                    "n_iterations": settings.n_iterations,
                    "burn_in": settings.burn_in,
                    "thin": settings.thin,
                    "adapt_window": settings.adapt_window,
                    "target_accept": settings.target_accept,
                },
                "n_replicates": args.reps,
                "seed": args.seed,
            },
            fh,
            indent=2,
        )
    oc = run_operating_characteristics(
        scenario,
        config,
        settings,
        args.reps,
        args.seed,
        n_workers=args.threads,
        out_dir=out_dir,
    )
    with open(out_dir / "oc.json", "w") as fh:
        json.dump(oc.to_dict(), fh, indent=2)
    with open(out_dir / "oc.csv", "w") as fh:
        fh.write(_oc_csv([oc]))
    _print_oc(oc)
    print(f"written: {out_dir}/oc.json, oc.csv, replicates.jsonl")
    return 0


def _cmd_report(args) -> int:
    run_dir = Path(args.in_dir)
    meta = _load_json(run_dir / "run.json")
    config = ModelConfig.from_dict(meta["config"])
    scenario = scenario_from_dict(meta["scenario"], config)
    rows = load_replicate_records(run_dir / "replicates.jsonl")
    records = (DecisionRecord.from_dict(r["decisions"]) for r in rows)
    oc = aggregate_records(scenario, config, records, meta["seed"])
    if args.format == "json":
        print(json.dumps(oc.to_dict(), indent=2))
    else:
        print(_oc_csv([oc]), end="")
    return 0


def _cmd_analyze(args) -> int:
    config = _load_config(args.config)
    data = TrialData.from_dict(_load_json(args.data))
    settings = McmcSettings(
        n_iterations=args.iterations, burn_in=args.burn_in, seed=args.seed
    )
    report = analyze(data, config, settings, args.stage)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
        return 0
    rec = report.decisions
    probs = rec.posterior_probs
    print(f"{args.stage} analysis ({config.n_indications} indications)")
    for j in range(config.n_indications):
        line = f"  indication {j + 1}: "
        if args.stage == "interim":
            line += f"P(go)={_fmt(probs['go'][j])} vs s1={config.s1} -> "
            line += "GO" if rec.go_stage1[j] else "NO-GO"
        else:
            if rec.final[j] is None:
                line += "stopped at stage 1"
            else:
                sel = {0: "no dose", 1: "DL-H", 2: "DL-L"}[rec.final[j]]
                line += (
                    f"P(poc-H)={_fmt(probs['poc_high'][j])} P(poc-L)={_fmt(probs['poc_low'][j])} "
                    f"P(gap)={_fmt(probs['do'][j])} -> select {sel}"
                )
        print(line)
    for w in rec.warnings:
        print(f"  warning: {w}")
    print("posterior summaries (mean, sd, 95% interval, rhat, ess):")
    for name, s in report.posterior_summaries.items():
        print(
            f"  {name:>14}: {s.mean: .4f}  {s.sd:.4f}  [{s.q2_5: .4f}, {s.q97_5: .4f}]"
            f"  rhat={s.rhat:.3f} ess={s.ess:.0f}"
        )
    return 0


def _cmd_calibrate(args) -> int:
    p2 = tuple(float(x) for x in args.p2.split(","))
    grid = []
    k = 0
    while True:
        v = round(args.grid_min + k * args.grid_step, 10)
        if v > args.grid_max + 1e-12:
            break
        grid.append(v)
        k += 1
    req = calib.CalibrationRequest(args.delta, p2, tuple(grid))
    tau2 = calib.calibrate_tau2(req)
    table = calib.calibration_table(req)
    if args.json:
        print(json.dumps({"tau2": tau2, "feasible": tau2 is not None, "table": table}, indent=2))
        return 0
    if tau2 is None:
        print(f"no feasible tau2 on the grid for delta <= {args.delta}")
    else:
        print(f"tau2 = {tau2}")
    header = "tau2      " + "  ".join(f"delta(p2={p:g})" for p in p2)
    print(header)
    for row in table:
        mark = "*" if row["feasible"] else " "
        deltas = "  ".join(f"{d:12.6f}" for d in row["deltas"])
        print(f"{row['tau2']:<8g}{mark} {deltas}")
    return 0


def _cmd_scenarios(args) -> int:
    scenarios = builtin_scenarios()
    if args.json:
        print(json.dumps([s.to_dict() for s in scenarios], indent=2))
        return 0
    for s in scenarios:
        print(f"{s.name:>15}: DL-H {s.high_rates}  DL-L {s.low_rates}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        job_dir=args.job_dir,
        max_parallel_jobs=args.max_parallel_jobs,
        static_dir=args.static_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mats", description="Multi-arm two-stage design engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate operating characteristics for a scenario")
    p.add_argument("--scenario", required=True, help="built-in scenario name or scenario JSON file")
    p.add_argument("--config", help="design config JSON file (defaults to the standard design)")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--iterations", type=int, default=4000, help="kept MCMC iterations per fit")
    p.add_argument("--burn-in", type=int, default=2000)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("report", help="re-aggregate a finished simulation run")
    p.add_argument("--in", dest="in_dir", required=True, help="directory written by simulate")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("analyze", help="analyze observed trial counts")
    p.add_argument("--data", required=True, help="trial data JSON file")
    p.add_argument("--config", help="design config JSON file")
    p.add_argument("--stage", choices=("interim", "final"), required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--iterations", type=int, default=4000)
    p.add_argument("--burn-in", type=int, default=2000)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("calibrate-tau2", help="pick the dose-gap threshold from a target rate difference")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--p2", required=True, help="comma-separated plausible low-dose rates")
    p.add_argument("--grid-min", type=float, default=0.1)
    p.add_argument("--grid-max", type=float, default=1.5)
    p.add_argument("--grid-step", type=float, default=0.1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("scenarios", help="list built-in scenarios")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_scenarios)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=int(os.environ.get("MATS_PORT", 8716)))
    p.add_argument("--job-dir", default=os.environ.get("MATS_JOB_DIR"))
    p.add_argument(
        "--max-parallel-jobs", type=int, default=int(os.environ.get("MATS_MAX_PARALLEL_JOBS", 1))
    )
    p.add_argument(
        "--static-dir",
        default=os.environ.get("MATS_STATIC_DIR"),
        help="serve a built design-studio bundle at / (e.g. frontend/dist)",
    )
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
