"""
API 라우터 - 메인 라우터
"""
from fastapi import APIRouter

from app import __version__
from app.api.v1.endpoints import equilibrium, scenarios, system

api_router = APIRouter()

# 내장 시나리오
api_router.include_router(
    scenarios.router,
    prefix="/scenarios",
    tags=["Scenarios"],
    responses={404: {"description": "Not found"}}
)

# 균형 계산
api_router.include_router(
    equilibrium.router,
    prefix="/equilibrium",
    tags=["Equilibrium"],
    responses={404: {"description": "Not found"}}
)

# 시스템 정보
api_router.include_router(
    system.router,
    prefix="/system",
    tags=["System"],
    responses={404: {"description": "Not found"}}
)


@api_router.get("/")
async def api_root():
    """API 루트 엔드포인트"""
    return {
        "message": "Narrative Equilibrium API v1",
        "version": __version__,
        "features": ["Equilibrium Solving", "Closed-form Verification", "Narrative Search", "Linearization"],
        "documentation": "/docs",
        "health_check": "/health"
    }
