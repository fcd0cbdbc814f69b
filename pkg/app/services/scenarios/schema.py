"""
시나리오 설정과 결과 리포트 스키마 (schema_version 1)
"""
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, field_validator, model_validator

from app.config import settings

SCHEMA_VERSION = 1


class CostSpec(BaseModel):
    """비용 함수 C(Δ) 명세"""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["quadratic", "power"] = Field("quadratic", description="비용 함수 종류")
    k: float = Field(1.0, gt=0, description="비용 계수")
    r: float = Field(2.0, gt=1, description="power 비용 지수")


class FamilySpec(BaseModel):
    """명시적 조건부 분포족: (a,y) = (0,0),(0,1),(1,0),(1,1) 순서의 4개 행

    delta_order: 행별 섭동 차수 (생략 시 모든 행이 δ로 균등 혼합)
    """

    model_config = ConfigDict(extra="forbid")

    label: Optional[str] = None
    rows: List[List[float]] = Field(..., min_length=4, max_length=4)
    delta_order: Optional[Annotated[List[PositiveFloat], Field(min_length=4, max_length=4)]] = None


class DagSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    nodes: List[int] = Field(..., min_length=2)
    edges: List[List[int]] = Field(default_factory=list)

    @field_validator("edges")
    @classmethod
    def _pairs(cls, edges: List[List[int]]) -> List[List[int]]:
        for edge in edges:
            if len(edge) != 2:
                raise ValueError(f"간선은 [부모, 자식] 쌍이어야 합니다: {edge}")
        return edges


class DagEnumeration(BaseModel):
    """DAG 집합 열거 옵션"""

    model_config = ConfigDict(extra="forbid")

    max_nodes: Optional[int] = Field(None, ge=2)
    perfect_only: bool = False
    action_ancestral: bool = False
    exclude: List[DagSpec] = Field(default_factory=list)


class SolverSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tie_tol: float = Field(default_factory=lambda: settings.tie_tol, gt=0)
    re_tol: float = Field(default_factory=lambda: settings.re_tol, gt=0)
    scan_points: int = Field(default_factory=lambda: settings.scan_points, ge=3)
    xtol: float = Field(default_factory=lambda: settings.root_xtol, gt=0)


class ScenarioConfig(BaseModel):
    """모델 인스턴스 (n, μ, d*, ε, δ, C, Q, 𝓡) 와 풀이 설정"""

    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    name: Optional[str] = None
    description: Optional[str] = None
    citation: Optional[str] = None
    n: int = Field(..., gt=2, le=12)
    mu: float = Field(..., gt=0, lt=1)
    d_star: float = Field(..., gt=0, lt=1)
    epsilon: float = Field(default_factory=lambda: settings.default_epsilon, gt=0, lt=0.5)
    delta: float = Field(default_factory=lambda: settings.default_delta, gt=0, lt=0.1)
    cost: CostSpec = Field(default_factory=CostSpec)
    q_set: List[Union[FamilySpec, str]] = Field(..., min_length=1)
    dag_set: Union[List[DagSpec], DagEnumeration] = Field(default_factory=DagEnumeration)
    solver: SolverSpec = Field(default_factory=SolverSpec)
    seed: int = 0

    @field_validator("q_set")
    @classmethod
    def _generators(cls, entries: List[Union[FamilySpec, str]]) -> List[Union[FamilySpec, str]]:
        for entry in entries:
            if isinstance(entry, str):
                head = entry.split(":", 1)[0]
                if head not in ("corners", "grid", "random", "mirror-closure"):
                    raise ValueError(
                        f"알 수 없는 분포족 생성기: '{entry}' (corners, grid:h, random:K, mirror-closure)"
                    )
        return entries

    @model_validator(mode="after")
    def _shapes(self) -> "ScenarioConfig":
        width = 2 ** (self.n - 2)
        for entry in self.q_set:
            if isinstance(entry, FamilySpec) and any(len(row) != width for row in entry.rows):
                raise ValueError(f"분포족 '{entry.label}'의 각 행 길이는 2^(n-2)={width}여야 합니다")
        if isinstance(self.dag_set, DagEnumeration) and self.dag_set.max_nodes is not None:
            if self.dag_set.max_nodes > self.n:
                raise ValueError(f"dag_set.max_nodes({self.dag_set.max_nodes})가 n({self.n})보다 큽니다")
        return self


class Comparison(BaseModel):
    """닫힌 형태 값과 풀이 결과 비교 한 줄"""

    quantity: str
    expected: Union[float, str]
    actual: Union[float, str, None]
    delta: Optional[float] = None
    tolerance: Optional[float] = None
    passed: bool


class ResultReport(BaseModel):
    """CLI/API 공용 결과 리포트"""

    schema_version: Literal[1] = SCHEMA_VERSION
    command: str
    scenario: Optional[ScenarioConfig] = None
    result: Dict[str, Any] = Field(default_factory=dict)
    checks: Dict[str, Any] = Field(default_factory=dict)
    citation: Optional[str] = None
    comparisons: Optional[List[Comparison]] = None
    passed: Optional[bool] = None
