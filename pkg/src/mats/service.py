"""HTTP facade over simulation, analysis and calibration.

Simulations run as asynchronous jobs (submit, then poll); analysis and
calibration are synchronous. The job store persists to an append-only
JSON-lines file so completed results survive restarts. No authentication:
this service is meant for a local or otherwise trusted deployment.

Environment: MATS_PORT (default 8716), MATS_JOB_DIR (job-store directory),
MATS_MAX_PARALLEL_JOBS (default 1).
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Union

from fastapi import FastAPI, HTTPException, Query
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import calibration as calib
from .analysis import analyze
from .mcmc import McmcSettings
from .model import ModelConfig, TrialData, default_config
from .scenarios import Scenario, builtin_scenarios, get_scenario, scenario_from_dict
from .simulate import run_operating_characteristics

DEFAULT_PORT = 8716


# ---------------------------------------------------------------------------
# request schemas


class SettingsSpec(BaseModel):
    n_iterations: int = 4000
    burn_in: int = 2000
    thin: int = 1
    adapt_window: int = 50
    target_accept: float = 0.44
    seed: int = 0

    def to_settings(self, seed: Optional[int] = None) -> McmcSettings:
        return McmcSettings(
            n_iterations=self.n_iterations,
            burn_in=self.burn_in,
            thin=self.thin,
            adapt_window=self.adapt_window,
            target_accept=self.target_accept,
            seed=self.seed if seed is None else seed,
        )


class SimulationRequest(BaseModel):
    scenario: Union[str, dict]
    config: Optional[dict] = None
    settings: SettingsSpec = Field(default_factory=SettingsSpec)
    n_replicates: int
    seed: int = 0
    n_workers: int = 1


class AnalyzeRequest(BaseModel):
    data: dict
    stage: str
    config: Optional[dict] = None
    settings: SettingsSpec = Field(default_factory=SettingsSpec)
    seed: Optional[int] = None


class GridSpec(BaseModel):
    min: float = 0.1
    max: float = 1.5
    step: float = 0.1


class CalibrateRequest(BaseModel):
    delta: float
    p2: list
    grid: GridSpec = Field(default_factory=GridSpec)


def _bad_request(message: str, field: Optional[str] = None):
    detail = {"errors": [{"field": field, "message": message}]}
    return HTTPException(status_code=400, detail=detail)


def _parse_config(spec: Optional[dict]) -> ModelConfig:
    if spec is None:
        return default_config()
    try:
        return ModelConfig.from_dict(spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise _bad_request(str(exc), field="config")


def _parse_scenario(spec: Union[str, dict], config: ModelConfig) -> Scenario:
    try:
        if isinstance(spec, str):
            return get_scenario(spec, config)
        return scenario_from_dict(spec, config)
    except (KeyError, TypeError, ValueError) as exc:
        raise _bad_request(str(exc), field="scenario")


def _grid_values(grid: GridSpec) -> tuple:
    if grid.step <= 0 or grid.max < grid.min or grid.min <= 0:
        raise _bad_request("grid must satisfy 0 < min <= max with positive step", field="grid")
    values = []
    k = 0
    while True:
        v = round(grid.min + k * grid.step, 10)
        if v > grid.max + 1e-12:
            break
        values.append(v)
        k += 1
    return tuple(values)


# ---------------------------------------------------------------------------
# job store


class Job:
    __slots__ = ("id", "request", "status", "completed", "total", "result", "error", "created_at")

    def __init__(self, job_id: str, request: dict, total: int):
        self.id = job_id
        self.request = request
        self.status = "queued"
        self.completed = 0
        self.total = total
        self.result = None
        self.error = None
        self.created_at = time.time()

    def snapshot(self) -> dict:
        out = {
            "id": self.id,
            "status": self.status,
            "progress": (self.completed / self.total) if self.total else 0.0,
            "completed": self.completed,
            "total": self.total,
        }
        if self.status == "done":
            out["result"] = self.result
        if self.status == "failed":
            out["error"] = self.error
        return out


class JobManager:
    """Thread-safe job registry backed by an append-only JSON-lines log.

    On startup the log is replayed: completed jobs keep their results, jobs
    that never reached a terminal state are marked failed (interrupted).
    """

    def __init__(self, job_dir: Optional[Union[str, Path]] = None, max_parallel: int = 1):
        self._lock = threading.Lock()
        self._jobs: dict = {}
        self._order: list = []
        self._log_path = None
        if job_dir is not None:
            job_dir = Path(job_dir)
            job_dir.mkdir(parents=True, exist_ok=True)
            self._log_path = job_dir / "jobs.jsonl"
            self._replay()
        self._pool = ThreadPoolExecutor(max_workers=max_parallel, thread_name_prefix="mats-job")

    def _replay(self) -> None:
        if not self._log_path.exists():
            return
        with open(self._log_path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                kind = event["event"]
                if kind == "created":
                    job = Job(event["id"], event["request"], event["request"].get("n_replicates", 0))
                    self._jobs[job.id] = job
                    self._order.append(job.id)
                elif kind == "done" and event["id"] in self._jobs:
                    job = self._jobs[event["id"]]
                    job.status = "done"
                    job.result = event["result"]
                    job.completed = job.total
                elif kind == "failed" and event["id"] in self._jobs:
                    job = self._jobs[event["id"]]
                    job.status = "failed"
                    job.error = event["error"]
        for job in self._jobs.values():
            if job.status in ("queued", "running"):
                job.status = "failed"
                job.error = "interrupted by service restart"

    def _log(self, event: dict) -> None:
        if self._log_path is None:
            return
        with open(self._log_path, "a") as fh:
            fh.write(json.dumps(event) + "\n")

    def submit(self, request: SimulationRequest) -> str:
        job_id = uuid.uuid4().hex
        job = Job(job_id, request.model_dump(), request.n_replicates)
        with self._lock:
            self._jobs[job_id] = job
            self._order.append(job_id)
            self._log({"event": "created", "id": job_id, "request": job.request})
        self._pool.submit(self._execute, job_id)
        return job_id

    def _execute(self, job_id: str) -> None:
        job = self._jobs[job_id]
        with self._lock:
            job.status = "running"
            self._log({"event": "started", "id": job_id})
        try:
            req = SimulationRequest(**job.request)
            config = _parse_config(req.config)
            scenario = _parse_scenario(req.scenario, config)

            def on_progress(done: int, total: int) -> None:
                job.completed = done

            oc = run_operating_characteristics(
                scenario,
                config,
                req.settings.to_settings(),
                req.n_replicates,
                req.seed,
                n_workers=req.n_workers,
                progress_callback=on_progress,
            )
            with self._lock:
                job.result = oc.to_dict()
                job.completed = job.total
                job.status = "done"
                self._log({"event": "done", "id": job_id, "result": job.result})
        except Exception as exc:  # job must end failed, never hang
            with self._lock:
                job.status = "failed"
                job.error = str(exc)
                self._log({"event": "failed", "id": job_id, "error": job.error})

    def get(self, job_id: str) -> Optional[Job]:
        with self._lock:
            return self._jobs.get(job_id)

    def list(self) -> list:
        with self._lock:
            return [self._jobs[i].snapshot() for i in self._order]

    def shutdown(self) -> None:
        self._pool.shutdown(wait=False, cancel_futures=True)


# ---------------------------------------------------------------------------
# application


def create_app(
    job_dir: Optional[Union[str, Path]] = None,
    max_parallel_jobs: int = 1,
    static_dir: Optional[Union[str, Path]] = None,
) -> FastAPI:
    app = FastAPI(title="MATS design service", version="1")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    jobs = JobManager(job_dir=job_dir, max_parallel=max_parallel_jobs)
    app.state.jobs = jobs

    @app.exception_handler(RequestValidationError)
    def validation_handler(request, exc):
        errors = [
            {"field": ".".join(str(p) for p in err["loc"] if p != "body"), "message": err["msg"]}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": {"errors": errors}})

    @app.post("/api/v1/simulations", status_code=202)
    def submit_simulation(req: SimulationRequest):
        if req.n_replicates < 1:
            raise _bad_request("n_replicates must be >= 1", field="n_replicates")
        if req.n_workers < 1:
            raise _bad_request("n_workers must be >= 1", field="n_workers")
        config = _parse_config(req.config)
        scenario = _parse_scenario(req.scenario, config)
        if scenario.n_indications != config.n_indications:
            raise _bad_request("scenario and config disagree on the number of indications", field="scenario")
        try:
            req.settings.to_settings()
        except ValueError as exc:
            raise _bad_request(str(exc), field="settings")
        return {"id": app.state.jobs.submit(req)}

    @app.get("/api/v1/simulations")
    def list_simulations():
        return {"jobs": app.state.jobs.list()}

    @app.get("/api/v1/simulations/{job_id}")
    def get_simulation(job_id: str):
        job = app.state.jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job id {job_id!r}")
        return job.snapshot()

    @app.post("/api/v1/analyze")
    def run_analysis(req: AnalyzeRequest):
        config = _parse_config(req.config)
        try:
            data = TrialData.from_dict(req.data)
        except (KeyError, TypeError, ValueError) as exc:
            raise _bad_request(str(exc), field="data")
        try:
            settings = req.settings.to_settings(seed=req.seed)
            report = analyze(data, config, settings, req.stage)
        except ValueError as exc:
            raise _bad_request(str(exc))
        return report.to_dict()

    @app.post("/api/v1/calibrate-tau2")
    def calibrate(req: CalibrateRequest):
        grid = _grid_values(req.grid)
        try:
            request = calib.CalibrationRequest(req.delta, tuple(req.p2), grid)
        except ValueError as exc:
            raise _bad_request(str(exc))
        tau2 = calib.calibrate_tau2(request)
        return {
            "tau2": tau2,
            "feasible": tau2 is not None,
            "delta": req.delta,
            "p2": list(request.p2_candidates),
            "table": calib.calibration_table(request),
        }

    @app.get("/api/v1/scenarios")
    def list_scenarios():
        return {"scenarios": [s.to_dict() for s in builtin_scenarios()]}

    @app.get("/api/v1/curves")
    def curves(
        tau2: str = Query(default=",".join(str(t) for t in calib.default_grid())),
        p2_min: float = 0.01,
        p2_max: float = 0.99,
        points: int = 99,
    ):
        try:
            tau2_values = [float(t) for t in tau2.split(",") if t.strip()]
            if not tau2_values or any(t <= 0 for t in tau2_values):
                raise ValueError("tau2 values must be positive")
            if not (0.0 < p2_min < p2_max < 1.0) or points < 2:
                raise ValueError("require 0 < p2_min < p2_max < 1 and points >= 2")
        except ValueError as exc:
            raise _bad_request(str(exc))
        step = (p2_max - p2_min) / (points - 1)
        p2_grid = [p2_min + k * step for k in range(points)]
        out = []
        for t in tau2_values:
            out.append({
                "tau2": t,
                "points": [{"p2": p2, "delta": calib.delta_from_tau2(t, p2)} for p2 in p2_grid],
            })
        return {"curves": out}

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="studio")

    return app
