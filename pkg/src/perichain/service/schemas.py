"""Pydantic request/response models for the service API.

Requests validate strictly (unknown keys rejected) and convert to the core
domain types; responses are plain data so outputs serialize identically
whether the service runs in-process or over HTTP.
"""

from __future__ import annotations

import math
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..negf import Bath, SemiInfiniteLead, WideBand
from ..transfer import PeriodicPotential


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PotentialSpec(StrictModel):
    q: int = Field(ge=1)
    eps: list[float] = Field(min_length=1)

    @model_validator(mode="after")
    def _consistent(self) -> "PotentialSpec":
        if len(self.eps) != self.q:
            raise ValueError(f"eps has {len(self.eps)} entries but q = {self.q}")
        if not all(math.isfinite(e) for e in self.eps):
            raise ValueError("on-site energies must be finite")
        return self

    def to_potential(self) -> PeriodicPotential:
        return PeriodicPotential(self.eps)


class WideBandSpec(StrictModel):
    kind: Literal["wide-band"] = "wide-band"
    gamma: float = Field(default=1.0, gt=0)

    def to_bath(self) -> Bath:
        return WideBand(self.gamma)


class SemiInfiniteLeadSpec(StrictModel):
    kind: Literal["semi-infinite-lead"] = "semi-infinite-lead"
    t_bath: float = Field(default=5.0, gt=0)
    kappa: float = Field(default=1.0, gt=0)

    def to_bath(self) -> Bath:
        return SemiInfiniteLead(self.t_bath, self.kappa)


BathSpec = Annotated[
    Union[WideBandSpec, SemiInfiniteLeadSpec], Field(discriminator="kind")
]


class MuValue(StrictModel):
    value: float


class MuLinspace(StrictModel):
    start: float
    stop: float
    count: int = Field(ge=1)

    @model_validator(mode="after")
    def _ordered(self) -> "MuLinspace":
        if self.count > 1 and not self.stop > self.start:
            raise ValueError("linspace needs stop > start when count > 1")
        return self


class MuBandEdges(StrictModel):
    keyword: Literal["band-edges"]


MuSpec = Union[MuValue, MuLinspace, MuBandEdges]
MuGridSpec = Union[MuLinspace, MuBandEdges]


class NValues(StrictModel):
    values: list[int] = Field(min_length=1)

    @model_validator(mode="after")
    def _increasing(self) -> "NValues":
        if any(v <= 0 for v in self.values):
            raise ValueError("system sizes must be positive")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("system sizes must be strictly increasing")
        return self


class NGeometric(StrictModel):
    start_cells: int = Field(default=64, ge=1)
    doublings: int = Field(default=8, ge=0)


NSpec = Union[NValues, NGeometric]


class Tolerances(StrictModel):
    root: float = Field(default=1e-12, gt=0)
    classify: float = Field(default=1e-10, gt=0)


class BandsOptions(StrictModel):
    window: Optional[tuple[float, float]] = None
    grid_points: Optional[int] = Field(default=None, ge=2)
    k_samples: int = Field(default=33, ge=2)


def _positive_multiples_of(values: list[int], q: int) -> None:
    bad = [v for v in values if v % q != 0]
    if bad:
        raise ValueError(f"system sizes {bad} are not multiples of q = {q}")


class BandsRequest(StrictModel):
    potential: PotentialSpec
    options: BandsOptions = Field(default_factory=BandsOptions)
    tolerances: Tolerances = Field(default_factory=Tolerances)


class EigsRequest(StrictModel):
    potential: PotentialSpec
    mu: MuGridSpec
    tolerances: Tolerances = Field(default_factory=Tolerances)


class ScalingRequest(StrictModel):
    potential: PotentialSpec
    bath_left: BathSpec = Field(default_factory=WideBandSpec)
    bath_right: BathSpec = Field(default_factory=WideBandSpec)
    mu: MuSpec
    n: NSpec = Field(default_factory=NGeometric)
    workers: int = Field(default=1, ge=1)
    tolerances: Tolerances = Field(default_factory=Tolerances)

    @model_validator(mode="after")
    def _sizes_match_cell(self) -> "ScalingRequest":
        if isinstance(self.n, NValues):
            _positive_multiples_of(self.n.values, self.potential.q)
        return self


class SweepMuRequest(StrictModel):
    potential: PotentialSpec
    bath_left: BathSpec = Field(default_factory=WideBandSpec)
    bath_right: BathSpec = Field(default_factory=WideBandSpec)
    mu: MuSpec
    n: NSpec
    workers: int = Field(default=1, ge=1)
    tolerances: Tolerances = Field(default_factory=Tolerances)

    @model_validator(mode="after")
    def _sizes_match_cell(self) -> "SweepMuRequest":
        if isinstance(self.n, NValues):
            _positive_multiples_of(self.n.values, self.potential.q)
        return self


class VerifyRequest(StrictModel):
    potential: Optional[PotentialSpec] = None
    bath_left: BathSpec = Field(default_factory=WideBandSpec)
    bath_right: BathSpec = Field(default_factory=WideBandSpec)
    tolerance: Optional[float] = Field(default=None, gt=0)
    sigma_im_bias: float = 0.0


# --- responses ---------------------------------------------------------------


class TableMeta(BaseModel):
    command: str
    config_hash: str
    version: str
    generated_at: str


class EdgeOut(BaseModel):
    energy: float
    k_label: str
    multiplicity: str


class BandOut(BaseModel):
    index: int
    lower: float
    upper: float


class DispersionPoint(BaseModel):
    band: int
    k: float
    energy: float


class BandsResponse(BaseModel):
    meta: TableMeta
    edges: list[EdgeOut]
    bands: list[BandOut]
    dispersion: list[DispersionPoint]


class EigsRow(BaseModel):
    mu: float
    lambda_plus_re: float
    lambda_plus_im: float
    lambda_minus_re: float
    lambda_minus_im: float
    spectral_class: str
    discriminant: float


class EigsResponse(BaseModel):
    meta: TableMeta
    rows: list[EigsRow]


class ScalingPoint(BaseModel):
    n: int
    log_g: float


class ScalingRow(BaseModel):
    mu: float
    band_location: str
    regime: str
    delta: Optional[float]
    xi_fit: Optional[float]
    xi_formula: Optional[float]
    r_squared: float
    agrees_with_spectrum: bool
    points: list[ScalingPoint]


class ScalingResponse(BaseModel):
    meta: TableMeta
    rows: list[ScalingRow]


class SweepCell(BaseModel):
    mu: float
    n: int
    log_g: float
    band_location: str


class SweepMuResponse(BaseModel):
    meta: TableMeta
    rows: list[SweepCell]


class SuiteOut(BaseModel):
    name: str
    checks: int
    failures: int
    max_error: float
    tolerance: float
    passed: bool


class VerifyResponse(BaseModel):
    meta: TableMeta
    suites: list[SuiteOut]
    all_passed: bool


class ErrorBody(BaseModel):
    error: str
    message: str
