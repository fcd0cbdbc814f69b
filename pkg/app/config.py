from pydantic_settings import BaseSettings
from typing import Optional


class Settings(BaseSettings):
    # 서버 설정
    api_v1_str: str = "/api/v1"
    debug: bool = False
    log_level: str = "INFO"
    host: str = "0.0.0.0"
    port: int = 8000

    # 모델 기본값 (시나리오 파일이 우선)
    default_epsilon: float = 1e-3
    default_delta: float = 1e-6

    # 수치 허용오차
    tie_tol: float = 1e-9
    re_tol: float = 1e-9
    normalization_tol: float = 1e-12
    binarize_floor_delta: float = 1e-15

    # 균형 탐색 설정
    scan_points: int = 1024
    root_xtol: float = 1e-14

    # 스윕 병렬 처리
    sweep_workers: int = 1

    # 리포트 출력 (None이면 전체 정밀도)
    report_float_digits: Optional[int] = None

    class Config:
        env_file = ".env"
        env_prefix = "NARRATIVE_"

    @property
    def solver_defaults(self) -> dict:
        """시나리오에 solver 블록이 없을 때 쓰는 기본값"""
        return {
            "tie_tol": self.tie_tol,
            "re_tol": self.re_tol,
            "scan_points": self.scan_points,
            "xtol": self.root_xtol,
        }


settings = Settings()
