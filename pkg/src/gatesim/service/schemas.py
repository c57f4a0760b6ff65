"""Pydantic request/response models for the gatesim service."""

from __future__ import annotations

import math
from typing import Any, Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class SolveRequest(BaseModel):
    variant: str = "unshaped"
    k1: int = 1
    k2: int = 0
    k3: int = 0
    order: int = 1
    phi: float = math.pi
    r_p: float = 2.5
    g_m: float = 1.0
    units: str = "natural"
    g_m_mhz: float = 50.0


class SolveResponse(BaseModel):
    design: dict
    warnings: list[str] = Field(default_factory=list)


class RunRequest(BaseModel):
    config: dict


class RunResponse(BaseModel):
    scenario: str
    csv: str
    manifest: dict
    flagged: bool
    warnings: list[str] = Field(default_factory=list)


class SweepRequest(BaseModel):
    param: str
    lo: float
    hi: float
    count: int = 41
    gate: Optional[dict] = None
    n_fock: int = 15
    kappa: float = 0.0
    gamma: float = 0.0
    workers: Optional[int] = None


class ConvergenceRequest(BaseModel):
    config: dict
    refinement: int = 2
    fock_doubling: bool = True


class ConvergenceResponse(BaseModel):
    report: dict
    flagged: bool


class ErrorDetail(BaseModel):
    detail: Any
