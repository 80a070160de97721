"""Request and response shapes for the twisted-conjugacy service.

Every response model has a JSON schema shipped under ``twistedwreath/schemas``;
``SCHEMAS`` maps schema file stems to the models they were generated from.
Extended naturals serialize as either an exact integer or the string
``"infinite"``. Matrices travel as row-major text (``"0,1;-1,-1"``), group
elements as ``{(x1 .. xk)->c1,c2; ...} | z=(...)`` text.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

ExtendedNat = Union[int, Literal["infinite"]]

DEFAULT_ENUM_CAP = 2_000_000


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ClassifyRequest(StrictModel):
    group: str
    k: int


class CaseDecisionModel(StrictModel):
    case: int
    applicable: bool
    reason: str


class ClassifyResponse(StrictModel):
    group: str
    k: int
    decisions: list[CaseDecisionModel]
    applicable_cases: list[int]


class ConstructRequest(StrictModel):
    group: str
    k: int
    case: Optional[int] = Field(default=None, ge=1, le=3)


class AutomorphismModel(StrictModel):
    group: str
    k: int
    f_blocks: list[str]
    m: str
    twist: list[int]


class ConstructionModel(StrictModel):
    """The construction artifact: what `construct` emits and `verify` consumes."""

    case: int = Field(ge=1, le=3)
    automorphism: AutomorphismModel
    predicted_r: int
    block_layout: list[str]


class VerifyRequest(StrictModel):
    construction: ConstructionModel


class ComponentCheckModel(StrictModel):
    p: int
    r: int
    d: int
    det_assembled: int
    det_power: int
    unit: bool


class OrbitCheckModel(StrictModel):
    start: list[int]
    points: list[list[int]]
    length: int
    epimorphic: bool
    components: list[ComponentCheckModel]


class RepVerdictModel(StrictModel):
    rep: list[int]
    verdict: Literal["TrivialClasses", "InfiniteClasses"]
    orbit_checks: list[OrbitCheckModel]
    witness: Optional[str]


class VerifyResponse(StrictModel):
    group: str
    k: int
    r_bar: ExtendedNat
    representatives: list[list[int]]
    per_rep: list[RepVerdictModel]
    r_total: ExtendedNat
    certified: bool


class OracleRequest(StrictModel):
    group: str
    k: int
    n: int = Field(ge=2)
    case: Optional[int] = Field(default=None, ge=1, le=3)
    cap: int = Field(default=DEFAULT_ENUM_CAP, ge=1)


class OracleResponse(StrictModel):
    group: str
    k: int
    n: int
    case: int
    order: int
    class_count: int
    burnside: Optional[int]
    burnside_note: Optional[str]
    fixed_class_count: int
    counts_agree: bool
    representative_sample: list[str]
    timing_s: float


class PullbackModel(StrictModel):
    cylinder: bool
    verdict: Literal["holds", "fails", "inconclusive"]
    base_count: int
    class_count: int
    preconditions_ok: bool
    counterexample: Optional[list[str]]


class QuotientReportModel(StrictModel):
    n: int
    order: int
    class_count: int
    burnside: Optional[int]
    burnside_note: Optional[str]
    fixed_class_count: int
    counts_agree: bool
    pullback: PullbackModel


class ReportRequest(StrictModel):
    group: str
    k: int
    case: Optional[int] = Field(default=None, ge=1, le=3)
    n: list[int] = Field(default_factory=list)
    seed: int = 0
    cap: int = Field(default=DEFAULT_ENUM_CAP, ge=1)


class ReportInput(StrictModel):
    group: str
    k: int
    case: Optional[int]
    n: list[int]
    seed: int
    cap: int


class RunReport(StrictModel):
    """Full-pipeline artifact; byte-identical across reruns for a fixed seed."""

    version: str
    input: ReportInput
    group_canonical: str
    classification: ClassifyResponse
    construction: ConstructionModel
    compatibility_samples: int
    compatibility_ok: bool
    verification: VerifyResponse
    quotients: list[QuotientReportModel]
    consistency_ok: bool
    failures: list[str]


SCHEMAS: dict[str, type[BaseModel]] = {
    "classify_response": ClassifyResponse,
    "construct_response": ConstructionModel,
    "verify_response": VerifyResponse,
    "oracle_response": OracleResponse,
    "run_report": RunReport,
}
