"""
서사 신념 형성
베이지안 네트워크 인수분해 p_R, 결과 조건부, 예기 효용, 완전 DAG 성질 점검
"""
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.core.exceptions import DomainError, ValidationError
from app.services.dag import CausalDag, validate
from app.services.probability import (
    ConditionalFamily,
    JointDistribution,
    build_joint,
    flatten_tensor,
    marginal_tensor,
)

logger = logging.getLogger(__name__)

COST_KINDS = ("quadratic", "power")


# === 비용 함수 ===

@dataclass(frozen=True)
class CostFunction:
    """정책 이탈 비용 C(Δ)

    quadratic: kΔ², power: k|Δ|^r (r > 1)
    """

    kind: str = "quadratic"
    k: float = 1.0
    r: float = 2.0

    def __post_init__(self):
        if self.kind not in COST_KINDS:
            raise ValidationError(f"지원하지 않는 비용 함수: {self.kind} (허용: {', '.join(COST_KINDS)})")
        if not self.k > 0:
            raise DomainError(f"비용 계수 k는 양수여야 합니다: {self.k}")
        if self.kind == "power" and not self.r > 1:
            raise DomainError(f"power 비용 지수 r은 1보다 커야 합니다: {self.r}")
        if self.kind == "quadratic" and self.r != 2.0:
            object.__setattr__(self, "r", 2.0)

    def __call__(self, delta: float) -> float:
        return self.k * abs(delta) ** self.r

    def derivative(self, delta: float) -> float:
        return float(np.sign(delta)) * self.k * self.r * abs(delta) ** (self.r - 1.0)

    def to_spec(self) -> dict:
        spec = {"kind": self.kind, "k": self.k}
        if self.kind == "power":
            spec["r"] = self.r
        return spec


# === 신념 ===

@dataclass(frozen=True, eq=False)
class Belief:
    """인수분해된 주관적 분포 p_R

    tensor의 축은 nodes 순서를 따른다. mu는 객관적 p(y=1).
    """

    nodes: Tuple[int, ...]
    tensor: np.ndarray
    mu: float

    @cached_property
    def table(self) -> np.ndarray:
        return flatten_tensor(self.tensor)

    @cached_property
    def outcome_conditional(self) -> np.ndarray:
        """2×2 표 [a][y] = p_R(y | a)"""
        inner = tuple(range(1, len(self.nodes) - 1))
        ay = self.tensor.sum(axis=inner) if inner else self.tensor
        return ay / ay.sum(axis=1, keepdims=True)

    @property
    def p1(self) -> float:
        """p_R(y=1 | a=1)"""
        return float(self.outcome_conditional[1, 1])

    @property
    def p0(self) -> float:
        """p_R(y=1 | a=0)"""
        return float(self.outcome_conditional[0, 1])

    @property
    def slope(self) -> float:
        return self.p1 - self.p0

    def node_marginal(self, node: int) -> float:
        """p_R(x_node = 1)"""
        axis = self.nodes.index(node)
        others = tuple(k for k in range(len(self.nodes)) if k != axis)
        return float(self.tensor.sum(axis=others)[1])


def _check_dag(p: JointDistribution, dag: CausalDag) -> None:
    violations = validate(dag, p.n)
    if violations:
        raise ValidationError(f"유효하지 않은 DAG {dag.label}: {', '.join(violations)}")


@lru_cache(maxsize=4096)
def _factorization_plan(dag: CausalDag) -> Tuple[str, Tuple[Tuple[Tuple[int, ...], Tuple[int, ...], int], ...]]:
    """einsum 식과 노드별 (family, parents, node 위치)"""
    letters = {node: chr(ord("a") + k) for k, node in enumerate(dag.nodes)}
    families = []
    subscripts = []
    for node in dag.nodes:
        parents = dag.parents(node)
        family = tuple(sorted(parents + (node,)))
        families.append((family, parents, family.index(node)))
        subscripts.append("Z" + "".join(letters[i] for i in family))
    output = "Z" + "".join(letters[i] for i in dag.nodes)
    return ",".join(subscripts) + "->" + output, tuple(families)


def _batch_marginal(batch: np.ndarray, n: int, nodes: Sequence[int]) -> np.ndarray:
    drop = tuple(i for i in range(1, n + 1) if i not in nodes)
    return batch.sum(axis=drop)


def factorize_batch(batch: np.ndarray, dag: CausalDag) -> np.ndarray:
    """결합분포 묶음 (B,)+(2,)*n 을 DAG로 인수분해한 (B,)+(2,)*|N| 텐서 (정규화 전)"""
    n = batch.ndim - 1
    expression, families = _factorization_plan(dag)
    operands = []
    for family, parents, position in families:
        joint = _batch_marginal(batch, n, family)
        parent_marginal = np.expand_dims(_batch_marginal(batch, n, parents), axis=1 + position)
        operands.append(joint / parent_marginal)
    return np.einsum(expression, *operands, optimize=True)


def outcome_batch(batch: np.ndarray, dag: CausalDag) -> np.ndarray:
    """결합분포 묶음에 대한 p_R(y=1 | a), 모양 (B, 2)"""
    tensor = factorize_batch(batch, dag)
    inner = tuple(range(2, tensor.ndim - 1))
    ay = tensor.sum(axis=inner) if inner else tensor
    return ay[:, :, 1] / ay.sum(axis=2)


def factorize(p: JointDistribution, dag: CausalDag) -> Belief:
    """p_R(x_N) = Π_{i∈N} p(x_i | x_{R(i)})"""
    _check_dag(p, dag)
    if not p.has_full_support:
        raise DomainError("factorize에는 완전지지 분포가 필요합니다")
    tensor = factorize_batch(p.tensor[np.newaxis], dag)[0]
    total = tensor.sum()
    if abs(total - 1.0) > settings.normalization_tol:
        logger.warning(f"p_R 정규화 오차 {abs(total - 1.0):.3e}: {dag.label}")
    return Belief(nodes=dag.nodes, tensor=tensor / total, mu=p.mu)


def outcome_conditional(belief: Belief) -> np.ndarray:
    return belief.outcome_conditional


def _check_policy(d: float, epsilon: float) -> None:
    if not epsilon - 1e-12 <= d <= 1.0 - epsilon + 1e-12:
        raise DomainError(f"정책 d={d}가 [{epsilon}, {1.0 - epsilon}] 밖에 있습니다")


def gross_utility(belief: Belief, d: float, epsilon: float = 0.0) -> float:
    """V = d·p_R(y=1|a=1) + (1−d)·p_R(y=1|a=0)"""
    _check_policy(d, epsilon)
    return d * belief.p1 + (1.0 - d) * belief.p0


def net_utility(belief: Belief, d: float, cost: CostFunction, d_star: float, epsilon: float = 0.0) -> float:
    """U = V − C(d − d*)"""
    return gross_utility(belief, d, epsilon) - cost(d - d_star)


# === 서사 ===

@dataclass(frozen=True)
class Narrative:
    """조건부 분포족 q와 인과 DAG의 쌍"""

    q: ConditionalFamily
    dag: CausalDag

    @property
    def label(self) -> str:
        return f"{self.q.label or 'q'}|{self.dag.label}"

    def joint(self, alpha: float, mu: float) -> JointDistribution:
        return build_joint(alpha, mu, self.q)

    def belief(self, alpha: float, mu: float) -> Belief:
        return factorize(self.joint(alpha, mu), self.dag)


def status_quo_distortion(belief: Belief, alpha: float) -> float:
    """V(s, α | α) − μ (부호 포함)"""
    return gross_utility(belief, alpha) - belief.mu


def nsqd_deviation(belief: Belief, alpha: float) -> float:
    """|V(s, α | α) − μ|, μ는 신념이 가진 객관적 p(y=1)"""
    return abs(status_quo_distortion(belief, alpha))


def marginal_distortion(p: JointDistribution, dag: CausalDag) -> float:
    """max_{i∈N} |p_R(x_i=1) − p(x_i=1)|"""
    belief = factorize(p, dag)
    gaps = [
        abs(belief.node_marginal(i) - float(marginal_tensor(p, (i,))[1]))
        for i in dag.nodes
    ]
    return max(gaps)


def is_rational_expectations(belief: Belief, tol: Optional[float] = None) -> bool:
    tol = settings.re_tol if tol is None else tol
    return bool(np.all(np.abs(belief.outcome_conditional[:, 1] - belief.mu) <= tol))


def ordinal_rewrite_check(belief: Belief, alpha: float, d: float) -> float:
    """NSQD 서사에서 V(d) = ((d−α)/(1−α))·p_R(y=1|a=1) + ((1−d)/(1−α))·μ 의 오차"""
    rewritten = ((d - alpha) / (1.0 - alpha)) * belief.p1 + ((1.0 - d) / (1.0 - alpha)) * belief.mu
    return abs(gross_utility(belief, d) - rewritten)


def group_by_belief(
    items: Sequence[Tuple[Hashable, Belief]], tol: Optional[float] = None
) -> List[List[Hashable]]:
    """같은 p_R(y|a)를 유도하는 서사끼리 묶음 (입력 순서 유지)"""
    tol = settings.tie_tol if tol is None else tol
    groups: List[List[Hashable]] = []
    representatives: Dict[int, np.ndarray] = {}
    for key, belief in items:
        for g, rep in representatives.items():
            if np.max(np.abs(rep - belief.outcome_conditional)) <= tol:
                groups[g].append(key)
                break
        else:
            representatives[len(groups)] = belief.outcome_conditional
            groups.append([key])
    return groups
