#!/usr/bin/env python3
"""
서사 균형 툴킷 - HTTP API 애플리케이션
"""
import logging
import platform
from contextlib import asynccontextmanager
from typing import Optional

import uvicorn
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app import __version__
from app.api.v1.router import api_router
from app.config import settings
from app.core.logging import setup_logging
from app.services.scenarios import list_builtins

logger = logging.getLogger(__name__)


class NarrativeApplication:
    """서사 균형 API 애플리케이션 클래스"""

    def __init__(self):
        self.app = None
        self.is_running = False

    @asynccontextmanager
    async def lifespan(self, app: FastAPI):
        """애플리케이션 생명주기 관리"""
        await self.startup()
        yield
        await self.shutdown()

    def create_app(self) -> FastAPI:
        """FastAPI 애플리케이션 생성 및 설정"""
        app = FastAPI(
            title="Narrative Equilibrium",
            description="Equilibrium computation for competing causal narratives",
            version=__version__,
            docs_url="/docs",
            redoc_url="/redoc",
            lifespan=self.lifespan,
        )

        app.add_middleware(
            CORSMiddleware,
            allow_origins=["*"],
            allow_credentials=True,
            allow_methods=["*"],
            allow_headers=["*"],
        )

        app.include_router(api_router, prefix=settings.api_v1_str)
        self.setup_basic_endpoints(app)

        self.app = app
        return app

    def setup_basic_endpoints(self, app: FastAPI):
        """기본 엔드포인트 설정"""
        @app.get("/")
        async def root():
            return {
                "message": "Narrative Equilibrium API",
                "status": "running" if self.is_running else "starting",
                "platform": platform.system(),
                "version": __version__,
            }

        @app.get("/health")
        async def health_check():
            return {
                "status": "healthy",
                "builtin_scenarios": len(list_builtins()),
                "environment": "development" if settings.debug else "production",
            }

    async def startup(self):
        setup_logging(settings.log_level)
        logger.info(f"🚀 Narrative Equilibrium API 시작 - {platform.system()}")
        logger.info(f"🌐 서버 주소: http://{settings.host}:{settings.port}")
        self.is_running = True

    async def shutdown(self):
        logger.info("🛑 Narrative Equilibrium API 종료")
        self.is_running = False


# 전역 애플리케이션 인스턴스
narrative_app = NarrativeApplication()

# FastAPI 앱 인스턴스 (외부에서 import 가능)
app = narrative_app.create_app()


def serve(host: Optional[str] = None, port: Optional[int] = None):
    """uvicorn으로 API 서버 실행"""
    uvicorn.run(
        app,
        host=host or settings.host,
        port=port or settings.port,
        log_level=settings.log_level.lower(),
    )


def main():
    """메인 함수 - 개발용 서버 실행"""
    serve()


if __name__ == "__main__":
    main()
