"""
서사 균형 툴킷 예외 계층
"""
from typing import Any, Dict, List, Optional, Sequence, Tuple


class NarrativeError(Exception):
    """모든 도메인 예외의 기반 클래스"""


class DomainError(NarrativeError, ValueError):
    """인자가 정의역 밖에 있음 (α, μ, δ, d 범위, 겹치는 인덱스 집합 등)"""


class ValidationError(NarrativeError, ValueError):
    """잘못된 확률표, 조건부 분포족, DAG 명세"""


class UnsupportedStructureError(NarrativeError):
    """정션 트리 이론이 적용되지 않는 구조 (불완전 DAG 등)"""


class SolverError(NarrativeError):
    """균형을 찾지 못함 - 스캔한 g(α) 표를 함께 보관"""

    def __init__(self, message: str, scan: Optional[Sequence[Tuple[float, float]]] = None):
        super().__init__(message)
        self.scan: List[Tuple[float, float]] = list(scan or [])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": str(self),
            "scan": [{"alpha": a, "g": g} for a, g in self.scan],
        }


class ConfigError(NarrativeError):
    """시나리오 설정 로드/파싱 실패

    Args:
        message: 오류 설명
        field: 문제가 된 필드 경로 (예: "cost.k")
        line: JSON 구문 오류 줄 번호
        column: JSON 구문 오류 열 번호
    """

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        location = []
        if field:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}, column {column}")
        full = f"{message} ({'; '.join(location)})" if location else message
        super().__init__(full)
        self.field = field
        self.line = line
        self.column = column
