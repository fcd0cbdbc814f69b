"""
내장 시나리오 API 엔드포인트
"""
import logging
from typing import Optional

from fastapi import APIRouter, HTTPException, Query

from app.api.v1.endpoints.common import run_report
from app.core.exceptions import ConfigError
from app.services.scenarios import ORACLES, list_builtins, load_scenario, run_verify

logger = logging.getLogger(__name__)
router = APIRouter()


@router.get("")
async def get_scenarios():
    """내장 시나리오 목록"""
    return {
        "scenarios": list_builtins(),
        "verifiable": sorted(ORACLES),
    }


@router.get("/{name}")
async def get_scenario(name: str):
    """내장 시나리오 설정 조회"""
    if name not in list_builtins():
        raise HTTPException(status_code=404, detail=f"알 수 없는 시나리오: {name}")
    try:
        config = load_scenario(name)
    except ConfigError as e:
        raise HTTPException(status_code=500, detail=str(e))
    return config.model_dump(mode="json")


@router.get("/{name}/verify")
async def verify_scenario(
    name: str,
    k: Optional[float] = Query(None, gt=0, description="비용 계수 덮어쓰기"),
    eps: Optional[float] = Query(None, gt=0, lt=0.5, description="정책 정의역 여유 덮어쓰기"),
    delta: Optional[float] = Query(None, gt=0, lt=0.1, description="완전지지 섭동 덮어쓰기"),
):
    """내장 시나리오를 풀고 닫힌 형태 값과 비교"""
    if name not in list_builtins():
        raise HTTPException(status_code=404, detail=f"알 수 없는 시나리오: {name}")
    return await run_report(run_verify, name, k=k, eps=eps, delta=delta)
