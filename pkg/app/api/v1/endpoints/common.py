"""
엔드포인트 공용 헬퍼
"""
import asyncio
import logging
from functools import partial
from typing import Any, Callable, Dict

from fastapi import HTTPException

from app.core.exceptions import ConfigError, DomainError, SolverError, UnsupportedStructureError, ValidationError
from app.services.scenarios import ResultReport

logger = logging.getLogger(__name__)


async def run_report(func: Callable[..., ResultReport], *args: Any, **kwargs: Any) -> Dict[str, Any]:
    """블로킹 계산을 기본 executor에서 실행하고 도메인 예외를 HTTP 오류로 변환"""
    loop = asyncio.get_running_loop()
    try:
        report = await loop.run_in_executor(None, partial(func, *args, **kwargs))
    except (ConfigError, DomainError, ValidationError, UnsupportedStructureError) as e:
        logger.warning(f"요청 오류: {e}")
        raise HTTPException(status_code=400, detail=str(e))
    except SolverError as e:
        logger.error(f"균형 탐색 실패: {e}")
        raise HTTPException(status_code=500, detail=e.to_dict())
    return report.model_dump(mode="json")
