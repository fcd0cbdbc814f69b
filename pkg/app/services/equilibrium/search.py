"""
n=3 최적 서사 탐색과 닫힌 형태 상한
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from app.core.exceptions import DomainError
from app.services.dag import CausalDag, role_name
from app.services.probability import ConditionalFamily

logger = logging.getLogger(__name__)


def _check_unit(alpha: float, mu: float) -> None:
    for name, value in (("alpha", alpha), ("mu", mu)):
        if not 0.0 < value < 1.0:
            raise DomainError(f"{name}는 (0,1) 안에 있어야 합니다: {value}")


def _check_action(target: int) -> None:
    if target not in (0, 1):
        raise DomainError(f"목표 행동은 0 또는 1이어야 합니다: {target}")


def _weight(alpha: float, target: int) -> float:
    """목표 행동의 빈도 p(a=target)"""
    return alpha if target == 1 else 1.0 - alpha


def lever_codings(alpha: float, mu: float, target: int = 1) -> Dict[str, float]:
    """δ→0 극한에서 결정적 x_2 부호화별 레버 서사의 p_R(y=1 | a=target)

    disjunction: x_2 = y ∨ [a=target]  →  μ / (μ + w(1−μ))
    conjunction: x_2 = y ∧ [a=target]  →  μ + μ(1−μ)(1−w) / (1−wμ)
    나머지 결정적 부호화(상수, a, y, 배타적 논리합 등)는 둘 중 큰 값을 넘지 못한다.
    conjunction이 더 큰 것은 w + μ > 1 일 때다.
    """
    _check_unit(alpha, mu)
    _check_action(target)
    w = _weight(alpha, target)
    return {
        "disjunction": mu / (mu + w * (1.0 - mu)),
        "conjunction": mu + mu * (1.0 - mu) * (1.0 - w) / (1.0 - w * mu),
    }


# (부호화, 목표 행동) → p(x_2=1 | a, y) 패턴 (p00, p01, p10, p11)
_CODING_PATTERNS = {
    ("disjunction", 1): (0.0, 1.0, 1.0, 1.0),   # y + a(1−y)
    ("disjunction", 0): (1.0, 1.0, 0.0, 1.0),   # y + (1−a)(1−y)
    ("conjunction", 1): (0.0, 0.0, 0.0, 1.0),   # a·y
    ("conjunction", 0): (0.0, 1.0, 0.0, 0.0),   # (1−a)·y
}


def lever_optimal_patterns(
    alpha: float, mu: float, target: int = 1, tol: float = 1e-6
) -> List[Tuple[float, float, float, float]]:
    """레버 상한을 (tol 안에서) 달성하는 (p00, p01, p10, p11) 패턴 (x_2 재표기 포함)"""
    codings = lever_codings(alpha, mu, target)
    best = max(codings.values())
    patterns = []
    for name, value in codings.items():
        if best - value <= tol:
            pattern = _CODING_PATTERNS[(name, target)]
            patterns.extend([pattern, tuple(1.0 - v for v in pattern)])
    return patterns


def lever_bound(alpha: float, mu: float, target: int = 1) -> float:
    """레버 서사가 만들 수 있는 최대 p_R(y=1 | a=target)

    disjunction 부호화의 μ/(μ+w(1−μ))는 w + μ ≤ 1 에서만 상한이다.
    """
    return max(lever_codings(alpha, mu, target).values())


def opportunity_bound(alpha: float, mu: float, target: int = 1) -> float:
    """기회(충돌) 서사가 만들 수 있는 최대 p_R(y=1 | a=target)"""
    _check_unit(alpha, mu)
    _check_action(target)
    return 1.0 - _weight(alpha, target) * (1.0 - mu)


# === 닫힌 형태 신념 (q 배열에 대해 벡터화) ===

def _split(q: np.ndarray):
    """q[..., 4] = (p00, p01, p10, p11), p_ay = p(x_2=1 | a, y)"""
    return q[..., 0], q[..., 1], q[..., 2], q[..., 3]


def lever_outcome(q: np.ndarray, alpha: float, mu: float) -> np.ndarray:
    """a → x_2 → y 서사의 p_R(y=1 | a), 모양 (..., 2)"""
    p00, p01, p10, p11 = _split(np.asarray(q, dtype=float))
    x_given_a = [(1 - mu) * p00 + mu * p01, (1 - mu) * p10 + mu * p11]
    x1 = (1 - alpha) * x_given_a[0] + alpha * x_given_a[1]
    y1_x1 = ((1 - alpha) * mu * p01 + alpha * mu * p11) / x1
    y1_x0 = ((1 - alpha) * mu * (1 - p01) + alpha * mu * (1 - p11)) / (1 - x1)
    return np.stack([xa * y1_x1 + (1 - xa) * y1_x0 for xa in x_given_a], axis=-1)


def collider_outcome(q: np.ndarray, alpha: float, mu: float) -> np.ndarray:
    """a → y ← x_2 서사의 p_R(y=1 | a), 모양 (..., 2)"""
    p00, p01, p10, p11 = _split(np.asarray(q, dtype=float))
    rows = [(p00, p01), (p10, p11)]
    x1 = sum(w * ((1 - mu) * r[0] + mu * r[1]) for w, r in zip((1 - alpha, alpha), rows))
    values = []
    for p_a0, p_a1 in rows:
        y1_x1 = mu * p_a1 / ((1 - mu) * p_a0 + mu * p_a1)
        y1_x0 = mu * (1 - p_a1) / ((1 - mu) * (1 - p_a0) + mu * (1 - p_a1))
        values.append(x1 * y1_x1 + (1 - x1) * y1_x0)
    return np.stack(values, axis=-1)


_OUTCOMES = {"lever": (lever_outcome, lever_bound), "opportunity": (collider_outcome, opportunity_bound)}


@dataclass
class SearchResult:
    role: str
    target: int
    q: ConditionalFamily
    value: float
    bound: float
    evaluated: int
    codings: Optional[Dict[str, float]] = None

    @property
    def gap(self) -> float:
        return self.bound - self.value

    def to_dict(self) -> Dict[str, Any]:
        p00, p01, p10, p11 = self.q.x2_probabilities()
        return {
            "role": self.role,
            "target": self.target,
            "q": {"p00": p00, "p01": p01, "p10": p10, "p11": p11},
            "value": self.value,
            "bound": self.bound,
            "gap": self.gap,
            "evaluated": self.evaluated,
            "codings": self.codings,
        }


def _argmax(candidates: np.ndarray, values: np.ndarray) -> Tuple[np.ndarray, float]:
    best = int(np.argmax(values))
    return candidates[best], float(values[best])


def optimal_narrative_search(
    dag: CausalDag,
    alpha: float,
    mu: float,
    target: int = 1,
    delta: float = 1e-6,
    grid: Optional[float] = None,
) -> SearchResult:
    """p_R(y=1 | a=target)를 최대화하는 q = (p00, p01, p10, p11) 탐색

    꼭짓점 {δ, 1−δ}^4 전수 조사 후, grid가 주어지면 간격 h 격자와
    최적점 주변 h/5 국소 격자를 추가로 조사한다.
    """
    _check_unit(alpha, mu)
    _check_action(target)
    role = role_name(dag)
    if role is None:
        raise DomainError(f"탐색은 lever 또는 opportunity DAG만 지원합니다: {dag.label}")
    if not 0.0 < delta < 0.1:
        raise DomainError(f"delta는 (0, 0.1) 안에 있어야 합니다: {delta}")
    outcome, bound = _OUTCOMES[role]

    def evaluate(points: np.ndarray) -> np.ndarray:
        return outcome(points, alpha, mu)[..., target]

    candidates = np.array(list(itertools.product((delta, 1.0 - delta), repeat=4)))
    best_q, best_value = _argmax(candidates, evaluate(candidates))
    evaluated = len(candidates)

    if grid is not None:
        if not 0.0 < grid <= 0.5:
            raise DomainError(f"격자 간격은 (0, 0.5] 안에 있어야 합니다: {grid}")
        axis = np.clip(np.arange(0.0, 1.0 + grid / 2, grid), delta, 1.0 - delta)
        dense = np.array(list(itertools.product(np.unique(axis), repeat=4)))
        q_dense, v_dense = _argmax(dense, evaluate(dense))
        evaluated += len(dense)
        step = grid / 5.0
        local_axes = [
            np.unique(np.clip(center + step * np.arange(-5, 6), delta, 1.0 - delta)) for center in q_dense
        ]
        local = np.array(list(itertools.product(*local_axes)))
        q_local, v_local = _argmax(local, evaluate(local))
        evaluated += len(local)
        for q_c, v_c in ((q_dense, v_dense), (q_local, v_local)):
            if v_c > best_value:
                best_q, best_value = q_c, v_c

    family = ConditionalFamily.binary(*best_q.tolist(), label=f"search:{role}:a={target}")
    limit = bound(alpha, mu, target)
    logger.debug(f"최적 서사 탐색: {role}, a={target}, 값={best_value:.6f}, 후보 {evaluated}개")
    if best_value > limit + 1e-9:
        logger.warning(f"탐색 값이 닫힌 형태 상한을 넘었습니다: {role}, a={target}, 값={best_value:.6f}, 상한={limit:.6f}")
    return SearchResult(
        role=role,
        target=target,
        q=family,
        value=best_value,
        bound=limit,
        evaluated=evaluated,
        codings=lever_codings(alpha, mu, target) if role == "lever" else None,
    )
