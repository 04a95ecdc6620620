"""HTTP service exposing generation, calibration, runs, comparisons, and bounds.

The service is stateless: every request carries its own config (and, for
file-backed datasets, the CSV content inline), and responses carry the
full flat-file payloads, so a thin client just writes them to disk.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict

from . import __version__
from .erm import ConvergenceError
from .experiments import (
    METHODS,
    ConfigError,
    bound_value,
    calibration_table,
    compare_methods,
    config_from_dict,
    generate_dataset,
    run_experiment,
)

__all__ = ["create_app", "ConfigModel"]


class ConfigModel(BaseModel):
    """Wire mirror of :class:`dpsketch.experiments.ExperimentConfig`."""

    model_config = ConfigDict(extra="forbid")

    dataset: str = "synthetic"
    loss: str = "logistic"
    n: int = 1000
    d: int = 8
    profile: str = "uniform"
    m0: float = 1.0
    m_min: float = 1.0
    m_max: float = 100.0
    m_big: float = 100.0
    planted: str = "ball"
    planted_w: list[float] | None = None
    flip_noise: float = 0.1
    margin_scale: float = 2.0
    data_seed: int = 0
    distribution: str = "singleton-uniform"
    blocks: int = 4
    tau: int = 2
    epsilon: float = 1.0
    delta: float = 1e-5
    schedule: str = "auto-convex"
    iters_t: int = 1
    iters_k: int = 10
    step_scale: float = 1.0
    seeds: list[int] = [0]
    out: str = "results"
    rescale_columns: bool = False
    methods: list[str] = list(METHODS)


class GenerateRequest(BaseModel):
    config: ConfigModel


class GenerateResponse(BaseModel):
    dataset_csv: str
    constants: dict


class CalibrateRequest(BaseModel):
    config: ConfigModel
    dataset_csv: str | None = None


class CalibrateResponse(BaseModel):
    table_csv: str
    audited_epsilon: float
    outer_t: int
    inner_k: int


class RunRequest(BaseModel):
    config: ConfigModel
    dataset_csv: str | None = None


class CompareRequest(BaseModel):
    config: ConfigModel
    methods: list[str] | None = None
    dataset_csv: str | None = None


class RunResponse(BaseModel):
    results_csv: str
    summary: dict
    all_diverged: bool


class BoundRequest(BaseModel):
    config: ConfigModel
    row: str | None = None
    regime: str | None = None
    dataset_csv: str | None = None


class BoundResponse(BaseModel):
    row: str
    regime: str
    value: float


def _config(model: ConfigModel):
    try:
        return config_from_dict(model.model_dump())
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def _client_fault(exc: Exception) -> HTTPException:
    return HTTPException(status_code=400, detail=str(exc))


def create_app() -> FastAPI:
    app = FastAPI(title="dpsketch", version=__version__)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/gen", response_model=GenerateResponse)
    def gen(request: GenerateRequest) -> GenerateResponse:
        try:
            result = generate_dataset(_config(request.config))
        except (ValueError, ConvergenceError) as exc:
            raise _client_fault(exc) from exc
        return GenerateResponse(**result)

    @app.post("/calibrate", response_model=CalibrateResponse)
    def calibrate(request: CalibrateRequest) -> CalibrateResponse:
        try:
            result = calibration_table(_config(request.config), request.dataset_csv)
        except (ValueError, ConvergenceError) as exc:
            raise _client_fault(exc) from exc
        return CalibrateResponse(**result)

    @app.post("/run", response_model=RunResponse)
    def run(request: RunRequest) -> RunResponse:
        try:
            artifacts = run_experiment(_config(request.config), request.dataset_csv)
        except (ValueError, ConvergenceError) as exc:
            raise _client_fault(exc) from exc
        return RunResponse(
            results_csv=artifacts.csv_text,
            summary=artifacts.summary,
            all_diverged=artifacts.all_diverged,
        )

    @app.post("/compare", response_model=RunResponse)
    def compare(request: CompareRequest) -> RunResponse:
        try:
            artifacts = compare_methods(
                _config(request.config), request.methods, request.dataset_csv
            )
        except (ValueError, ConvergenceError) as exc:
            raise _client_fault(exc) from exc
        return RunResponse(
            results_csv=artifacts.csv_text,
            summary=artifacts.summary,
            all_diverged=artifacts.all_diverged,
        )

    @app.post("/bound", response_model=BoundResponse)
    def bound(request: BoundRequest) -> BoundResponse:
        try:
            result = bound_value(
                _config(request.config), request.row, request.regime, request.dataset_csv
            )
        except (ValueError, ConvergenceError) as exc:
            raise _client_fault(exc) from exc
        return BoundResponse(**result)

    return app
