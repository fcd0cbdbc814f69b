"""
서사 반박 분석 - 서사가 주장하는 조건부 독립 중 객관적 분포가 위반하는 것
"""
import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from app.services.dag import CausalDag, IndependenceStatement, local_independencies
from app.services.probability import JointDistribution, marginal_tensor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CIViolation:
    statement: IndependenceStatement
    deviation: float

    def to_dict(self) -> dict:
        return {
            "statement": str(self.statement),
            "left": sorted(self.statement.left),
            "right": sorted(self.statement.right),
            "given": sorted(self.statement.given),
            "deviation": self.deviation,
        }


def _aligned(p: JointDistribution, nodes: Sequence[int], frame: Tuple[int, ...]) -> np.ndarray:
    """nodes 위 주변분포를 frame 축에 맞춰 브로드캐스트 가능한 모양으로"""
    tensor = marginal_tensor(p, nodes)
    present = set(nodes)
    shape = tuple(2 if node in present else 1 for node in frame)
    return tensor.reshape(shape)


def independence_deviation(p: JointDistribution, statement: IndependenceStatement) -> float:
    """max |p(L,R,G)·p(G) − p(L,G)·p(R,G)|"""
    left, right, given = statement.left, statement.right, statement.given
    frame = tuple(sorted(left | right | given))
    full = _aligned(p, frame, frame)
    lg = _aligned(p, sorted(left | given), frame)
    rg = _aligned(p, sorted(right | given), frame)
    g = _aligned(p, sorted(given), frame)
    return float(np.max(np.abs(full * g - lg * rg)))


def ci_violations(p: JointDistribution, dag: CausalDag, tol: float = 1e-9) -> List[CIViolation]:
    """DAG의 국소 마르코프 독립 명제 중 p에서 tol 이상 어긋나는 것"""
    seen = set()
    violations = []
    for statement in local_independencies(dag):
        key = (frozenset((statement.left, statement.right)), statement.given)
        if key in seen:
            continue
        seen.add(key)
        deviation = independence_deviation(p, statement)
        if deviation > tol:
            violations.append(CIViolation(statement, deviation))
    if violations:
        logger.debug(f"{dag.label}: 독립 명제 위반 {len(violations)}건")
    return violations
