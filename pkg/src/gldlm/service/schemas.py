"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class LambdaMixin(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lambdas: list[float] = Field(alias="lambda", min_length=4, max_length=4)


class EvalRequest(LambdaMixin):
    stat: Literal["quantile", "density", "pdf", "cdf"] = "quantile"
    at: list[float]


class EvalResponse(BaseModel):
    stat: str
    at: list[float]
    values: list[float]


class LmomRequest(LambdaMixin):
    max_order: int = 6


class SampleLmomRequest(BaseModel):
    data: list[float]
    max_order: int = 4


class SolveSymmetricRequest(BaseModel):
    tau4: float


class ValidateRequest(LambdaMixin):
    pass


class ValidateResponse(BaseModel):
    valid: bool
    region: str
    lmoments_exist: bool


class AtlasRequest(BaseModel):
    region: int
    resolution: int = 512
    limits: Optional[list[list[float]]] = None  # [[lo3, hi3], [lo4, hi4]]
    boundary: bool = True


class ContourRequest(BaseModel):
    region: int
    statistic: Literal["tau3", "tau4"]
    levels: list[float]
    resolution: int = 512
    limits: Optional[list[list[float]]] = None


class CensusRequest(BaseModel):
    tau3: float
    tau4: float


class FitRequest(BaseModel):
    data: list[float]
    starts: list[list[float]] = Field(default_factory=list)
    compute_ks: bool = True


class SampleRequest(LambdaMixin):
    n: int
    seed: int


class SampleResponse(BaseModel):
    seed: int
    values: list[float]


class SimulateRequest(LambdaMixin):
    sample_size: int
    replications: int
    seed: int
    report_smaller_start: bool = True


class HealthResponse(BaseModel):
    status: str
    version: str
