"""
시스템 정보 API 엔드포인트
"""
import logging
import platform
from datetime import datetime
from typing import Any, Dict, Optional

from fastapi import APIRouter
from pydantic import BaseModel, Field

from app import __version__
from app.config import settings

logger = logging.getLogger(__name__)
router = APIRouter()


class SystemResponse(BaseModel):
    """시스템 응답 모델"""
    success: bool
    message: str
    data: Optional[Dict[str, Any]] = None
    timestamp: str = Field(default_factory=lambda: datetime.now().isoformat())


@router.get("/info")
async def get_system_info():
    """버전과 수치 기본값 조회"""
    return SystemResponse(
        success=True,
        message="시스템 정보 조회 성공",
        data={
            "version": __version__,
            "platform": {
                "system": platform.system(),
                "python_version": platform.python_version(),
            },
            "application": {
                "debug_mode": settings.debug,
                "log_level": settings.log_level,
                "api_version": settings.api_v1_str,
            },
            "numerics": {
                "default_epsilon": settings.default_epsilon,
                "default_delta": settings.default_delta,
                "normalization_tol": settings.normalization_tol,
                "binarize_floor_delta": settings.binarize_floor_delta,
                "sweep_workers": settings.sweep_workers,
                **settings.solver_defaults,
            },
        },
    )
