"""Pydantic request and response models for the certification service."""
from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, Field

Ratio = Union[str, int, float]
Mode = Literal["exact", "float"]


class ForestModel(BaseModel):
    vertices: list[str]
    parent: dict[str, str]


class TailModel(BaseModel):
    prefix_sq: list[Ratio] = Field(default_factory=list)
    constant_sq: Ratio


class WeightsModel(BaseModel):
    sq: dict[str, Ratio]
    tails: dict[str, TailModel] = Field(default_factory=dict)


class ShiftModel(BaseModel):
    forest: ForestModel
    weights: WeightsModel
    allow_leaves: bool = False


class MeasureAtom(BaseModel):
    t: Ratio
    w: Ratio


class MeasureModel(BaseModel):
    atoms: list[MeasureAtom] = Field(default_factory=list)


class ComplexModel(BaseModel):
    re: Ratio = 0
    im: Ratio = 0


class ForestValidateRequest(BaseModel):
    forest: ForestModel


class ForestPowerRequest(BaseModel):
    forest: ForestModel
    k: int = Field(ge=1)


class ForestRootedSumRequest(BaseModel):
    forests: list[ForestModel]
    auto_prefix: bool = True


class ForestBackwardRequest(BaseModel):
    forest: ForestModel
    k: int = Field(ge=0)


class ForestClassifyRequest(BaseModel):
    forest: ForestModel
    tailed_leaves: list[str] = Field(default_factory=list)


class ForestResponse(BaseModel):
    status: Literal["ok"] = "ok"
    forest: ForestModel
    roots: list[str]
    components: int
    summary: Optional[str] = None


class ClassifyResponse(BaseModel):
    status: Literal["ok"] = "ok"
    kind: str
    arms: Optional[int] = None


class CheckRequest(BaseModel):
    shift: ShiftModel
    property: Literal["hyponormal", "power-hyponormal", "subnormal"]
    k: int = Field(default=1, ge=1)
    k_max: int = Field(default=4, ge=1)
    mode: Mode = "exact"


class CheckResponse(BaseModel):
    status: Literal["holds", "fails", "obstruction"]
    property: str
    witness: Optional[str] = None
    reports: Optional[list[dict[str, Any]]] = None
    certificate: Optional[dict[str, Any]] = None
    all_k_certified: Optional[bool] = None


class ExtendSingleRequest(BaseModel):
    shift: ShiftModel
    k: int = Field(ge=0)
    scale: Optional[Ratio] = None
    mode: Mode = "exact"


class ExtendRootedSumRequest(BaseModel):
    shifts: list[ShiftModel]
    k: int = Field(ge=0)
    mode: Mode = "exact"


class ExtendJoinDepthRequest(BaseModel):
    shifts: list[ShiftModel]
    envelope: ForestModel
    k: int = Field(ge=1)
    mode: Mode = "exact"


class PowerhypoMember(BaseModel):
    shift: ShiftModel
    ext_sq: Ratio


class ExtendPowerhypoRequest(BaseModel):
    members: list[PowerhypoMember]
    k_max: int = Field(default=4, ge=1)
    scales_sq: Optional[list[Ratio]] = None
    mode: Mode = "exact"


class ExtendResponse(BaseModel):
    status: Literal["ok"] = "ok"
    shift: dict[str, Any]
    plan: Optional[dict[str, Any]] = None
    theta_sq: Optional[list[Ratio]] = None
    root_sq: Optional[list[Ratio]] = None
    frontier: Optional[list[str]] = None
    recertified: bool = True


class CounterexampleRequest(BaseModel):
    tree: Optional[ForestModel] = None
    generate: Optional[int] = Field(default=None, ge=3)
    seed: int = 0
    fork: Optional[str] = None
    mode: Mode = "exact"


class CounterexampleResponse(BaseModel):
    status: Literal["ok"] = "ok"
    shift: dict[str, Any]
    v0: str
    v1: str
    v2: str
    beta: Ratio
    grafted: bool
    verification: dict[str, Any]


class GaugeRequest(BaseModel):
    forest: ForestModel
    weights: dict[str, ComplexModel]
    mode: Mode = "exact"
    tolerance: float = Field(default=1e-9, gt=0)


class GaugeResponse(BaseModel):
    status: Literal["ok"] = "ok"
    beta: dict[str, ComplexModel]
    verified: bool
    max_error: Optional[float] = None


class MomentsRequest(BaseModel):
    measure: Optional[MeasureModel] = None
    shift: Optional[ShiftModel] = None
    vertex: Optional[str] = None
    n_max: int = Field(default=8, ge=0)
    k_negative: int = Field(default=0, ge=0)
    mode: Mode = "exact"


class MomentsResponse(BaseModel):
    status: Literal["ok"] = "ok"
    moments: list[Ratio]
    hankel: dict[str, Any]
    determinate: Optional[bool] = None
    measure: Optional[dict[str, Any]] = None
    defect: Optional[Ratio] = None
    feasible: Optional[bool] = None
    neg_moment: Optional[Ratio] = None


class ErrorResponse(BaseModel):
    status: Literal["error", "infeasible"]
    error: str
    detail: str
    witness: Optional[Any] = None
