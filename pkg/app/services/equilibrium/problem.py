"""
균형 문제 정의와 서사 신념 평가기
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.core.exceptions import DomainError, ValidationError
from app.services.dag import CausalDag, is_structurally_rational, validate
from app.services.equilibrium.policy import optimal_policies
from app.services.narrative import CostFunction, Narrative, outcome_batch
from app.services.probability import ConditionalFamily, joint_tensor_batch, perturb_full_support

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverOptions:
    tie_tol: float = field(default_factory=lambda: settings.tie_tol)
    re_tol: float = field(default_factory=lambda: settings.re_tol)
    scan_points: int = field(default_factory=lambda: settings.scan_points)
    xtol: float = field(default_factory=lambda: settings.root_xtol)
    policy_tol: float = 1e-8

    def __post_init__(self):
        if self.scan_points < 3:
            raise DomainError(f"scan_points는 3 이상이어야 합니다: {self.scan_points}")
        if self.tie_tol <= 0 or self.re_tol <= 0 or self.xtol <= 0:
            raise DomainError("허용오차는 양수여야 합니다")


@dataclass(frozen=True, eq=False)
class EquilibriumProblem:
    """하나의 모델 인스턴스 (n, μ, d*, ε, δ, C, Q, 𝓡)

    families는 섭동 전 분포족; 서사는 δ 섭동된 분포족과 DAG의 곱집합.
    """

    n: int
    mu: float
    d_star: float
    cost: CostFunction
    families: Tuple[ConditionalFamily, ...]
    dags: Tuple[CausalDag, ...]
    epsilon: float = field(default_factory=lambda: settings.default_epsilon)
    delta: float = field(default_factory=lambda: settings.default_delta)
    options: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        object.__setattr__(self, "families", tuple(self.families))
        object.__setattr__(self, "dags", tuple(self.dags))
        if not 2 < self.n <= 12:
            raise DomainError(f"n은 3..12 범위여야 합니다: {self.n}")
        for name, value in (("mu", self.mu), ("d_star", self.d_star)):
            if not 0.0 < value < 1.0:
                raise DomainError(f"{name}는 (0,1) 안에 있어야 합니다: {value}")
        if not 0.0 < self.epsilon < 0.5:
            raise DomainError(f"epsilon은 (0, 0.5) 안에 있어야 합니다: {self.epsilon}")
        if not 0.0 < self.delta < 0.1:
            raise DomainError(f"delta는 (0, 0.1) 안에 있어야 합니다: {self.delta}")
        if not self.families:
            raise DomainError("조건부 분포족 집합 Q가 비어 있습니다")
        if not self.dags:
            raise DomainError("DAG 집합이 비어 있습니다")
        for q in self.families:
            if q.n != self.n:
                raise ValidationError(f"분포족 {q.label}의 n={q.n}이 문제의 n={self.n}과 다릅니다")
        for dag in self.dags:
            violations = validate(dag, self.n)
            if violations:
                raise ValidationError(f"유효하지 않은 DAG {dag.label}: {', '.join(violations)}")

    @property
    def domain(self) -> Tuple[float, float]:
        return self.epsilon, 1.0 - self.epsilon

    @cached_property
    def perturbed(self) -> Tuple[ConditionalFamily, ...]:
        return tuple(perturb_full_support(q, self.delta) for q in self.families)

    @cached_property
    def narratives(self) -> Tuple[Narrative, ...]:
        """정규 순서: 분포족 순서 → DAG 순서"""
        return tuple(Narrative(q, dag) for q in self.perturbed for dag in self.dags)

    def replace(self, **changes) -> "EquilibriumProblem":
        values = {
            "n": self.n,
            "mu": self.mu,
            "d_star": self.d_star,
            "cost": self.cost,
            "families": self.families,
            "dags": self.dags,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "options": self.options,
        }
        values.update(changes)
        return EquilibriumProblem(**values)


class NarrativeEvaluator:
    """α 묶음에 대해 모든 서사의 p_R(y=1|a)를 계산

    구조적으로 합리적 기대인 DAG은 인수분해 없이 μ로 채운다.
    """

    def __init__(self, problem: EquilibriumProblem):
        self.problem = problem
        self._rational = [is_structurally_rational(dag) for dag in problem.dags]
        self._cache_alpha: Optional[float] = None
        self._cache_value: Optional[Tuple[np.ndarray, np.ndarray]] = None
        skipped = sum(self._rational)
        if skipped:
            logger.debug(f"구조적 합리적 기대 DAG {skipped}개는 인수분해 생략")

    @property
    def size(self) -> int:
        return len(self.problem.narratives)

    def outcomes(self, alphas: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        """(p0, p1), 각각 모양 (B, 서사 수)"""
        alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
        mu = self.problem.mu
        p0 = np.full((len(alphas), self.size), mu)
        p1 = np.full((len(alphas), self.size), mu)
        column = 0
        for q in self.problem.perturbed:
            batch = joint_tensor_batch(alphas, mu, q)
            for dag, rational in zip(self.problem.dags, self._rational):
                if not rational:
                    values = outcome_batch(batch, dag)
                    p0[:, column] = values[:, 0]
                    p1[:, column] = values[:, 1]
                column += 1
        return p0, p1

    def at(self, alpha: float) -> Tuple[np.ndarray, np.ndarray]:
        if self._cache_alpha != alpha:
            p0, p1 = self.outcomes([alpha])
            self._cache_alpha = alpha
            self._cache_value = (p0[0], p1[0])
        return self._cache_value

    def side_values(self, alphas: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        """U_r(α) = max_s max_{d∈[α,1−ε]} U, U_l(α) = max_s max_{d∈[ε,α]} U"""
        alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
        p0, p1 = self.outcomes(alphas)
        lo, hi = self.problem.domain
        u_right = np.empty(len(alphas))
        u_left = np.empty(len(alphas))
        for b, alpha in enumerate(alphas):
            cut = float(np.clip(alpha, lo, hi))
            u_right[b] = self._side_max(p0[b], p1[b], cut, hi)
            u_left[b] = self._side_max(p0[b], p1[b], lo, cut)
        return u_right, u_left

    def _side_max(self, p0: np.ndarray, p1: np.ndarray, lo: float, hi: float) -> float:
        problem = self.problem
        _, u = optimal_policies(p0, p1, problem.cost, problem.d_star, lo, hi)
        return float(u.max())

    def gap(self, alpha: float) -> float:
        """g(α) = U_r(α) − U_l(α)"""
        u_right, u_left = self.side_values([alpha])
        return float(u_right[0] - u_left[0])

    def rational_flags(self, alphas: Sequence[float]) -> np.ndarray:
        """각 서사가 모든 α에서 합리적 기대인지"""
        p0, p1 = self.outcomes(alphas)
        tol = self.problem.options.re_tol
        mu = self.problem.mu
        return np.all((np.abs(p0 - mu) <= tol) & (np.abs(p1 - mu) <= tol), axis=0)

    def labels(self) -> List[str]:
        return [s.label for s in self.problem.narratives]
