"""FastAPI service wrapping the simulation lab.

The service owns all computation; clients (the bundled CLI, or anything that
speaks JSON over HTTP) send configuration and receive CSV text plus the
manifest document, keeping file I/O on the client side.
"""

from __future__ import annotations

import warnings

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..design import InfeasibleDesignError, solve_shaped, solve_unshaped
from ..model import ParameterError
from ..scenarios import (
    ConfigError,
    GateSpec,
    ScenarioConfig,
    SweepSpec,
    config_from_dict,
    run_convergence,
    run_scenario,
)
from ..units import PhysicalContext, UnitError, design_report
from .schemas import (
    ConvergenceRequest,
    ConvergenceResponse,
    HealthResponse,
    RunRequest,
    RunResponse,
    SolveRequest,
    SolveResponse,
    SweepRequest,
)

CONFIG_ERRORS = (ConfigError, InfeasibleDesignError, ParameterError, UnitError, ValueError)


def create_app() -> FastAPI:
    app = FastAPI(title="gatesim service", version=__version__)

    @app.get("/api/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/api/solve", response_model=SolveResponse)
    def solve(req: SolveRequest) -> SolveResponse:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                if req.variant == "unshaped":
                    design = solve_unshaped(req.k1, req.k2, req.k3, req.phi, req.g_m, req.r_p)
                elif req.variant == "shaped":
                    design = solve_shaped(req.order, req.r_p, req.g_m, req.phi)
                else:
                    raise ConfigError(f"unknown gate variant {req.variant!r}")
                ctx = PhysicalContext(req.g_m_mhz) if req.units == "physical" else None
                report = design_report(design, ctx)
            except CONFIG_ERRORS as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
        return SolveResponse(design=report, warnings=[str(w.message) for w in caught])

    @app.post("/api/run", response_model=RunResponse)
    def run(req: RunRequest) -> RunResponse:
        cfg = _parse_config(req.config)
        result = run_scenario(cfg)
        return RunResponse(
            scenario=result.scenario,
            csv=result.csv_text,
            manifest=result.manifest,
            flagged=result.flagged,
            warnings=result.warnings,
        )

    @app.post("/api/sweep", response_model=RunResponse)
    def sweep(req: SweepRequest) -> RunResponse:
        try:
            gate = GateSpec(**(req.gate or {}))
            cfg = ScenarioConfig(
                scenario="sweep",
                sweep=SweepSpec(param=req.param, lo=req.lo, hi=req.hi, count=req.count),
                gate=gate,
                n_fock=req.n_fock,
                kappa=req.kappa,
                gamma=req.gamma,
                workers=req.workers,
            )
        except CONFIG_ERRORS as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        result = run_scenario(cfg)
        return RunResponse(
            scenario=result.scenario,
            csv=result.csv_text,
            manifest=result.manifest,
            flagged=result.flagged,
            warnings=result.warnings,
        )

    @app.post("/api/convergence", response_model=ConvergenceResponse)
    def convergence(req: ConvergenceRequest) -> ConvergenceResponse:
        cfg = _parse_config(req.config)
        report = run_convergence(cfg, req.refinement, req.fock_doubling)
        return ConvergenceResponse(report=report, flagged=bool(report["flags"]))

    return app


def _parse_config(data: dict) -> ScenarioConfig:
    try:
        return config_from_dict(data)
    except CONFIG_ERRORS as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
