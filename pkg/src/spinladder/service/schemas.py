"""Pydantic request/response models for the simulation service.

These mirror the library configuration types one-to-one; validation
errors surface through FastAPI as exhaustive 422 reports.
"""

from __future__ import annotations

import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, field_validator

from ..ensemble import EnsembleMode, EnsembleSpec
from ..model import Boundary, Couplings, LadderSpec
from ..propagate import EvolutionConfig, Method
from ..protocols import LeSchedule


class ModelParams(BaseModel):
    m: int = Field(default=5, ge=2, description="spins per leg")
    boundary: Literal["open", "ring"] = "ring"
    j_s: float = 1.0
    j_e: float = 1.0
    j_se: float = 0.1
    alpha: float = 0.0

    @field_validator("j_s", "j_e", "j_se", "alpha")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("coupling values must be finite")
        return v

    def spec(self) -> LadderSpec:
        return LadderSpec(m=self.m, boundary=Boundary(self.boundary))

    def couplings(self) -> Couplings:
        return Couplings(j_s=self.j_s, j_e=self.j_e, j_se=self.j_se, alpha=self.alpha)


class EnsembleParams(BaseModel):
    mode: Literal["exact_trace", "random_phase"] = "random_phase"
    n_realizations: int = Field(default=10, ge=1)
    seed: int = 0

    def to_spec(self) -> EnsembleSpec:
        return EnsembleSpec(
            mode=EnsembleMode(self.mode),
            n_realizations=self.n_realizations,
            seed=self.seed,
        )


class EvolutionParams(BaseModel):
    """Propagation knobs; the time horizon itself is set by the requested
    time grid or reversal schedule."""

    method: Literal["exact", "trotter2", "trotter4"] = "exact"
    dt: float = Field(default=0.01, gt=0)
    sample_stride: int = Field(default=1, ge=1)

    def to_config(self) -> EvolutionConfig:
        return EvolutionConfig(
            method=Method(self.method),
            dt=self.dt,
            sample_stride=self.sample_stride,
        )


class ScheduleParams(BaseModel):
    """Reversal-time grid; curves are indexed by total time t = 2 t_R."""

    spacing: Literal["log", "linear"] = "log"
    t_r_min: float = Field(default=0.05, gt=0)
    t_r_max: float = Field(default=500.0, gt=0)
    n_points: int = Field(default=140, ge=2)

    def to_schedule(self) -> LeSchedule:
        if self.t_r_max <= self.t_r_min:
            raise ValueError("t_r_max must exceed t_r_min")
        if self.spacing == "log":
            return LeSchedule.log_spaced(self.t_r_min, self.t_r_max, self.n_points)
        return LeSchedule(np.linspace(self.t_r_min, self.t_r_max, self.n_points))


class TimeGridParams(BaseModel):
    spacing: Literal["linear", "log"] = "linear"
    t_min: float = Field(default=0.05, gt=0, description="first point for log grids")
    t_max: float = Field(default=100.0, gt=0)
    n_points: int = Field(default=201, ge=2)

    def times(self) -> np.ndarray:
        if self.spacing == "log":
            return np.concatenate(
                [[0.0], np.geomspace(self.t_min, self.t_max, self.n_points)]
            )
        return np.linspace(0.0, self.t_max, self.n_points)


class ForwardRequest(BaseModel):
    model: ModelParams = ModelParams()
    ensemble: EnsembleParams = EnsembleParams()
    evolution: EvolutionParams = EvolutionParams()
    times: TimeGridParams = TimeGridParams()
    notes: list[str] = []


class LeRequest(BaseModel):
    model: ModelParams = ModelParams()
    ensemble: EnsembleParams = EnsembleParams()
    evolution: EvolutionParams = EvolutionParams()
    schedule: ScheduleParams = ScheduleParams()
    notes: list[str] = []


class SweepRequest(BaseModel):
    model: ModelParams = ModelParams()
    alphas: list[float] = Field(default=[0.0, -0.5, 1.0], min_length=1)
    j_se_values: list[float] = Field(
        default=[0.001, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5], min_length=1
    )
    ensemble: EnsembleParams = EnsembleParams()
    evolution: EvolutionParams = EvolutionParams()
    schedule: ScheduleParams = ScheduleParams()
    workers: int = Field(default=1, ge=1)
    notes: list[str] = []


class SpRequest(BaseModel):
    j_se: float = 0.3
    j_e: float = 1.0
    chain_length: int = Field(default=2000, ge=2)
    t_max: float = Field(default=80.0, gt=0)
    n_points: int = Field(default=1601, ge=2)
    notes: list[str] = []


class OnebodyRequest(BaseModel):
    m: int = Field(default=5, ge=2)
    ring: bool = False
    j: float = 1.0
    disorder: float = Field(default=0.0, ge=0)
    n_disorder: int | None = Field(
        default=None, ge=1, description="disorder draws; exhaustive when omitted"
    )
    seed: int = 0
    t_max: float = Field(default=30.0, gt=0)
    n_points: int = Field(default=601, ge=2)
    notes: list[str] = []


class FitRequest(BaseModel):
    run: str = Field(description="run id under the runs root, or a run directory path")
    t_cut: float = Field(default=0.5, gt=0)
    onset: float = Field(default=2.0, ge=0)
    plateau_guard: float = Field(default=3.0, gt=1)
    entry_level: float | None = Field(default=0.85, gt=0, lt=1)
    plateau: float | None = Field(
        default=None,
        description="override; defaults to the ergodic value 1/(2m) for ladder runs",
    )


class SeriesPayload(BaseModel):
    label: str
    observable: str
    times: list[float]
    values: list[float]
    meta: dict = {}


class RunResponse(BaseModel):
    run_id: str
    run_dir: str
    manifest: dict
    series: list[SeriesPayload]
    summary: dict = {}


class FitResponse(BaseModel):
    run_id: str
    report: dict


class VerifyCheck(BaseModel):
    name: str
    passed: bool
    measured: float
    bound: str


class VerifyResponse(BaseModel):
    passed: bool
    checks: list[VerifyCheck]


class HealthResponse(BaseModel):
    status: str
    version: str
