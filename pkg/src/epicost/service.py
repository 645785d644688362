"""HTTP service for the cost-exploration dashboard.

Serves a precomputed front plus on-demand cost-optimal evaluation and
model simulation.  The front and scenario are loaded once at startup and
never mutated; every response echoes the provenance hash of the front it
was computed from, so a client can detect mixed artifacts.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .costs import CostParams, cost_report, report_payload
from .data import SCHEMA_VERSION, load_artifact, load_scenario
from .errors import ConfigError
from .model import (
    DiseaseParams,
    MuSchedule,
    PolicyParams,
    StateVector,
    simulate,
)
from .pareto import front_from_payload


class GridSpec(BaseModel):
    min: float = Field(gt=0.0)
    max: float = Field(gt=0.0)
    n: int = Field(ge=2, le=5000)


class CostRequest(BaseModel):
    gdp: float = Field(ge=0.0)
    gdp_max_reduction: float = Field(ge=0.0, le=1.0)
    hospitalization_cost: float = Field(ge=0.0)
    vsl: float = Field(ge=0.0)
    fatality: float = Field(ge=0.0, le=1.0)
    grid: GridSpec | None = None


class DiseaseBody(BaseModel):
    r0: float = Field(gt=0.0)
    kappa: float = Field(gt=0.0)
    alpha: float = Field(gt=0.0)
    gamma: float = Field(gt=0.0)
    fatality: float = Field(ge=0.0, le=1.0)


class ScheduleBody(BaseModel):
    knots: list[float]
    knot_spacing: float = Field(default=14.0, gt=0.0)


class PolicyBody(BaseModel):
    xi: float = Field(ge=0.0)
    tau: float = Field(ge=0.0, lt=1.0)
    schedule: ScheduleBody


class SimulateRequest(BaseModel):
    disease_params: DiseaseBody
    policy_params: PolicyBody
    horizon: float = Field(gt=0.0, le=3660.0)
    step: float = Field(default=0.5, gt=0.0)
    population: float | None = Field(default=None, gt=0.0)


def create_app(front_path: str | Path, scenario_path: str | Path) -> FastAPI:
    artifact = load_artifact(front_path, expected_kind="front")
    front = front_from_payload(artifact.payload, artifact.provenance)
    scenario = load_scenario(scenario_path)
    horizon = scenario.horizon

    app = FastAPI(title="epicost service")
    # the dashboard is typically served from another origin; no credentials
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        # a body that is not valid JSON is a malformed request (400);
        # a well-formed body with bad fields is unprocessable (422)
        malformed = any(err.get("type") == "json_invalid" for err in exc.errors())
        detail = [
            {"loc": list(err.get("loc", ())), "msg": err.get("msg", "")}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400 if malformed else 422,
                            content={"detail": detail})

    @app.exception_handler(ConfigError)
    async def config_handler(request: Request, exc: ConfigError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/v1/front")
    def get_front():
        return {
            "schema_version": SCHEMA_VERSION,
            "provenance": front.provenance,
            "points": [
                {
                    "f1": p.f1,
                    "f2": p.f2,
                    "schedule": {
                        "knot_spacing": p.schedule.knot_spacing,
                        "knots": list(p.schedule.knots),
                    },
                }
                for p in front.points
            ],
        }

    @app.post("/v1/cost-optimal")
    def post_cost_optimal(body: CostRequest):
        params = CostParams(
            gdp=body.gdp,
            gdp_max_reduction=body.gdp_max_reduction,
            hospitalization_cost=body.hospitalization_cost,
            vsl=body.vsl,
            fatality=body.fatality,
        )
        grid = None
        if body.grid is not None:
            if body.grid.max <= body.grid.min:
                raise ConfigError("grid.max must exceed grid.min")
            grid = np.logspace(np.log10(body.grid.min), np.log10(body.grid.max),
                               body.grid.n)
        report = cost_report(front, params, horizon, grid)
        payload = report_payload(report, front)
        payload["schema_version"] = SCHEMA_VERSION
        payload["provenance"] = front.provenance
        return payload

    @app.post("/v1/simulate")
    def post_simulate(body: SimulateRequest):
        disease = DiseaseParams(**body.disease_params.model_dump())
        policy = PolicyParams(
            xi=body.policy_params.xi,
            tau=body.policy_params.tau,
            schedule=MuSchedule(
                knots=tuple(body.policy_params.schedule.knots),
                knot_spacing=body.policy_params.schedule.knot_spacing,
            ),
        )
        population = body.population if body.population is not None else scenario.population
        traj = simulate(StateVector(s=population), disease, policy,
                        body.horizon, body.step)
        return {
            "schema_version": SCHEMA_VERSION,
            "provenance": front.provenance,
            "times": traj.times.tolist(),
            "compartments": {
                name: traj.states[:, k].tolist()
                for k, name in enumerate(["s", "e", "i", "q", "r", "d"])
            },
            "cumulative_confirmed": traj.cumulative_confirmed.tolist(),
            "cumulative_incidence": traj.cumulative_incidence.tolist(),
        }

    return app
