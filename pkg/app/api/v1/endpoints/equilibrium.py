"""
균형 계산 API 엔드포인트
"""
import logging
from typing import Any, Dict, Literal, Optional

from fastapi import APIRouter, Query
from pydantic import BaseModel, Field

from app.api.v1.endpoints.common import run_report
from app.services.scenarios import ScenarioConfig, run_linearize, run_search, run_solve

logger = logging.getLogger(__name__)
router = APIRouter()

# === Pydantic 모델들 ===

class SearchRequest(BaseModel):
    """최적 서사 탐색 요청"""
    dag: Literal["lever", "collider"] = Field(..., description="탐색할 DAG")
    alpha: float = Field(..., gt=0, lt=1, description="p(a=1)")
    mu: float = Field(..., gt=0, lt=1, description="p(y=1)")
    target: Literal[0, 1] = Field(1, description="목표 행동")
    grid: Optional[float] = Field(None, gt=0, le=0.5, description="조밀 탐색 격자 간격")
    delta: float = Field(1e-6, gt=0, lt=0.1, description="꼭짓점 섭동")


class LinearizeRequest(BaseModel):
    """사슬 환원 요청"""
    dag: Dict[str, Any] = Field(..., description="DAG 명세 {nodes, edges}")
    dist: Dict[str, Any] = Field(..., description="분포 명세 {n, table} 또는 {alpha, mu, rows}")


# === 엔드포인트 ===

@router.post("/solve")
async def solve_equilibrium(
    scenario: ScenarioConfig,
    include_scan: bool = Query(False, description="g(α) 스캔 표 포함 여부"),
):
    """시나리오 균형 풀이"""
    logger.info(f"균형 풀이 요청: {scenario.name or 'unnamed'}")
    return await run_report(run_solve, scenario, include_scan=include_scan)


@router.post("/search")
async def search_narrative(request: SearchRequest):
    """p_R(y=1 | a=target)를 최대화하는 분포족 탐색"""
    return await run_report(
        run_search,
        request.dag,
        request.alpha,
        request.mu,
        target=request.target,
        grid=request.grid,
        delta=request.delta,
    )


@router.post("/linearize")
async def linearize_belief(request: LinearizeRequest):
    """완전 DAG 신념의 사슬 환원과 이진화"""
    return await run_report(run_linearize, request.dag, request.dist)
