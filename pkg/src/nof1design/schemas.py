"""Pydantic request/response models for the /api/v1 JSON contract.

Requests are fully self-contained (no server-side session); every response
echoes the resolved parameter set so the explorer never re-derives numbers.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

from .engine import PowerRequirement
from .model import ModelForm, RandomEffectsSpec, ResidualSpec
from .sequences import RandomizationScheme


class ModelIn(BaseModel):
    intercepts: str = "fixed"
    slopes: str = "random"

    def build(self) -> ModelForm:
        return ModelForm(intercepts=self.intercepts, slopes=self.slopes)


class ResidualIn(BaseModel):
    variance: float = 4.0
    structure: str = "ar1"
    correlation: float = 0.4

    def build(self) -> ResidualSpec:
        return ResidualSpec(
            variance=self.variance, structure=self.structure, correlation=self.correlation
        )


class RandomEffectsIn(BaseModel):
    var_intercept: float = 4.0
    var_slope: float = 1.0
    cov_intercept_slope: float = 1.0

    def build(self) -> RandomEffectsSpec:
        return RandomEffectsSpec(
            var_intercept=self.var_intercept,
            var_slope=self.var_slope,
            cov_intercept_slope=self.cov_intercept_slope,
        )


class RequirementIn(BaseModel):
    alpha: float = 0.05
    beta: float = 0.2
    delta_min: float = 1.0

    def build(self) -> PowerRequirement:
        return PowerRequirement(
            alpha=self.alpha, beta=self.beta, delta_min=self.delta_min
        )


class SchemeIn(BaseModel):
    kind: str = "pairwise"
    sequences: list[list[int]] | None = None

    def build(self) -> RandomizationScheme:
        if self.kind == "manual":
            return RandomizationScheme(
                "manual",
                manual_sequences=tuple(tuple(s) for s in (self.sequences or ())),
            )
        return RandomizationScheme(self.kind)


class ParameterSet(BaseModel):
    model: ModelIn = Field(default_factory=ModelIn)
    residual: ResidualIn = Field(default_factory=ResidualIn)
    random_effects: RandomEffectsIn = Field(default_factory=RandomEffectsIn)
    requirement: RequirementIn = Field(default_factory=RequirementIn)
    scheme: SchemeIn = Field(default_factory=SchemeIn)

    def build(self):
        return (
            self.model.build(),
            self.random_effects.build(),
            self.residual.build(),
            self.requirement.build(),
            self.scheme.build(),
        )


class OptimizedSearchRequest(ParameterSet):
    axis: str = "participants"
    range: tuple[int, int] = (2, 64)
    optimize_y_only: bool = False
    max_j: int = 1000
    max_l: int = 1000
    max_k: int = 12


class DesignsRequest(ParameterSet):
    participants: int | None = None
    measurements: int | None = None
    include_individual: bool = True
    optimize_y_only: bool = False
    se_axis_range: tuple[int, int] | None = None
    max_j: int = 1000
    max_l: int = 1000
    max_k: int = 12


class EnumerateRequest(BaseModel):
    scheme: SchemeIn = Field(default_factory=SchemeIn)
    k: int


class UploadRequest(BaseModel):
    content: str


class DesignRow(BaseModel):
    I: int
    J: int
    K: int
    L: int
    total: int
    se_pop: float
    power: float | None
    naive_min: float | None
    naive_mean: float | None
    naive_max: float | None
    shrunk_fixed: float | None
    shrunk_random: float | None
    optimized: bool
    naive_se: list[float | None]
    shrunken_fixed_se: list[float] | None
    shrunken_random_se: list[float] | None
    sequences: list[list[int]]


class CurvePointOut(BaseModel):
    x: int
    y_min: float
    y_mean: float
    y_max: float
    designs: list[DesignRow]


class OptimizedSearchResponse(BaseModel):
    parameters: dict
    axis: str
    points: list[CurvePointOut]


class SeriesPointOut(BaseModel):
    x: int
    y_min: float
    y_mean: float
    y_max: float


class IndividualSeOut(BaseModel):
    grouping: str
    series: dict[str, list[SeriesPointOut]]


class DesignsResponse(BaseModel):
    parameters: dict
    participants: int | None
    measurements: int | None
    designs: list[DesignRow]
    individual_se: IndividualSeOut | None


class EnumerateResponse(BaseModel):
    scheme: str
    k: int
    count: int
    sequences: list[list[int]]


class UploadResponse(BaseModel):
    k: int
    count: int
    sequences: list[list[int]]


class HealthResponse(BaseModel):
    status: str
    version: str
    engine: str
