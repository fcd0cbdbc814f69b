"""
서사별 최적 정책
U(d) = p0 + (p1 − p0)·d − C(d − d*) 의 구간 최대화
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import optimize

from app.core.exceptions import DomainError
from app.services.narrative import CostFunction, Narrative


@dataclass(frozen=True)
class Policy:
    """정책 d ∈ D = [ε, 1−ε]"""

    d: float
    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.epsilon < 0.5:
            raise DomainError(f"epsilon은 (0, 0.5) 안에 있어야 합니다: {self.epsilon}")
        if not self.epsilon - 1e-12 <= self.d <= 1.0 - self.epsilon + 1e-12:
            raise DomainError(f"정책 d={self.d}가 [{self.epsilon}, {1.0 - self.epsilon}] 밖에 있습니다")

    @property
    def domain(self) -> Tuple[float, float]:
        return self.epsilon, 1.0 - self.epsilon


def policy_value(p0: float, p1: float, d: float, cost: CostFunction, d_star: float) -> float:
    return p0 + (p1 - p0) * d - cost(d - d_star)


def optimal_policy(
    p0: float, p1: float, cost: CostFunction, d_star: float, lo: float, hi: float
) -> Tuple[float, float]:
    """[lo, hi] 위 오목 목적함수의 유일한 최대점과 최댓값"""
    slope = p1 - p0
    if cost.kind == "quadratic":
        d = float(np.clip(d_star + slope / (2.0 * cost.k), lo, hi))
    else:
        def derivative(x: float) -> float:
            return slope - cost.derivative(x - d_star)

        if derivative(lo) <= 0.0:
            d = lo
        elif derivative(hi) >= 0.0:
            d = hi
        else:
            d = optimize.brentq(derivative, lo, hi, xtol=1e-15)
    return d, policy_value(p0, p1, d, cost, d_star)


def optimal_policies(
    p0: np.ndarray, p1: np.ndarray, cost: CostFunction, d_star: float, lo: float, hi: float
) -> Tuple[np.ndarray, np.ndarray]:
    """optimal_policy의 배열 버전 (서사 여러 개 동시)"""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    if cost.kind == "quadratic":
        d = np.clip(d_star + (p1 - p0) / (2.0 * cost.k), lo, hi)
        return d, p0 + (p1 - p0) * d - cost.k * (d - d_star) ** 2
    pairs = [optimal_policy(a, b, cost, d_star, lo, hi) for a, b in zip(p0.ravel(), p1.ravel())]
    d = np.array([x for x, _ in pairs]).reshape(p0.shape)
    u = np.array([v for _, v in pairs]).reshape(p0.shape)
    return d, u


def best_policy(
    narrative: Narrative,
    alpha: float,
    mu: float,
    cost: CostFunction,
    d_star: float,
    epsilon: float,
    interval: Optional[Tuple[float, float]] = None,
) -> Tuple[float, float]:
    """서사의 α에서의 최적 정책 (d, U); interval이 있으면 D 안의 부분구간으로 제한"""
    lo, hi = Policy(epsilon, epsilon).domain
    if interval is not None:
        lo, hi = max(lo, interval[0]), min(hi, interval[1])
        if lo > hi:
            raise DomainError(f"빈 정책 구간: [{interval[0]}, {interval[1]}]")
    belief = narrative.belief(alpha, mu)
    return optimal_policy(belief.p0, belief.p1, cost, d_star, lo, hi)
