"""HTTP service exposing the experiment registry.

Run standalone with `btq serve` (uvicorn) for long-running or multi-client
use; the CLI talks to the same app in-process by default.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .experiments import REGISTRY, run_all, run_experiment
from .models import ExperimentConfig, ExperimentResult

app = FastAPI(
    title="btq experiment service",
    description="Seeded, reproducible quantization experiments over matrix "
                "domains with machine-readable results.",
    version="0.1.0",
)


class RegistryEntry(BaseModel):
    id: str
    summary: str
    defaults: dict


class RunAllRequest(BaseModel):
    config: ExperimentConfig = Field(default_factory=ExperimentConfig)
    jobs: int = Field(default=1, ge=1, le=64)


@app.get("/experiments", response_model=list[RegistryEntry])
def list_experiments() -> list[RegistryEntry]:
    return [RegistryEntry(id=e.id, summary=e.summary, defaults=e.defaults)
            for e in sorted(REGISTRY.values(), key=lambda e: e.id)]


@app.post("/experiments/{experiment_id}/run", response_model=ExperimentResult)
def run_one(experiment_id: str, config: ExperimentConfig) -> ExperimentResult:
    if experiment_id not in REGISTRY:
        raise HTTPException(status_code=404,
                            detail=f"unknown experiment id: {experiment_id}")
    cfg = config.override(experiment=experiment_id)
    return run_experiment(cfg)


@app.post("/experiments/run-all", response_model=list[ExperimentResult])
def run_everything(request: RunAllRequest) -> list[ExperimentResult]:
    return run_all(request.config, jobs=request.jobs)
