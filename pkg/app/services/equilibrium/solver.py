"""
균형 계산기
최적 반응, g(α) = U_r(α) − U_l(α) 근 탐색, 균형 조건 재검증
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import optimize

from app.core.exceptions import SolverError
from app.services.dag import role_name
from app.services.equilibrium.policy import optimal_policies
from app.services.equilibrium.problem import EquilibriumProblem, NarrativeEvaluator
from app.services.probability import mirror

logger = logging.getLogger(__name__)

KIND_PURE = "pure"
KIND_MIXED = "mixed"
KIND_RATIONAL = "rational_expectations"


def policy_side(d: float, d_star: float, tol: float = 1e-9) -> str:
    """d*와 비교한 정책 성향: hawk (d > d*), dove (d < d*), neutral"""
    if d > d_star + tol:
        return "hawk"
    if d < d_star - tol:
        return "dove"
    return "neutral"


@dataclass
class SupportElement:
    """균형 지지 집합의 (서사, 정책, 가중치)"""

    index: int
    narrative: str
    dag: str
    family: Optional[str]
    role: Optional[str]
    d: float
    weight: float
    p0: float
    p1: float
    side: str
    rational: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "narrative": self.narrative,
            "dag": self.dag,
            "family": self.family,
            "role": self.role,
            "d": self.d,
            "weight": self.weight,
            "belief": {"p_y1_given_a0": self.p0, "p_y1_given_a1": self.p1},
            "side": self.side,
            "rational_expectations": self.rational,
        }


@dataclass
class EquilibriumSolution:
    alpha: float
    support: List[SupportElement]
    u_star: float
    kind: str
    d_star: float
    roots: List[float] = field(default_factory=list)
    scan: Optional[List[Tuple[float, float]]] = None

    @property
    def bias(self) -> float:
        """α − d*"""
        return self.alpha - self.d_star

    def policy_weights(self, tol: float = 1e-9) -> List[Tuple[float, float]]:
        """같은 정책끼리 가중치 합산, 정책 내림차순"""
        groups: List[List[float]] = []
        for element in sorted(self.support, key=lambda e: -e.d):
            if groups and abs(groups[-1][0] - element.d) <= tol:
                groups[-1][1] += element.weight
            else:
                groups.append([element.d, element.weight])
        return [(d, w) for d, w in groups]

    def belief_classes(self, tol: float = 1e-9) -> List[Dict[str, Any]]:
        """같은 (정책, p_R(y|a))를 공유하는 서사를 하나의 동치류로 묶음"""
        classes: List[Dict[str, Any]] = []
        for element in self.support:
            for cls in classes:
                if (
                    abs(cls["d"] - element.d) <= tol
                    and abs(cls["p0"] - element.p0) <= tol
                    and abs(cls["p1"] - element.p1) <= tol
                ):
                    cls["narratives"].append(element.narrative)
                    cls["weight"] += element.weight
                    break
            else:
                classes.append({
                    "d": element.d,
                    "p0": element.p0,
                    "p1": element.p1,
                    "side": element.side,
                    "rational_expectations": element.rational,
                    "narratives": [element.narrative],
                    "weight": element.weight,
                })
        return classes

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "alpha": self.alpha,
            "kind": self.kind,
            "u_star": self.u_star,
            "bias": self.bias,
            "roots": list(self.roots),
            "policy_weights": [{"d": d, "weight": w} for d, w in self.policy_weights()],
            "classes": self.belief_classes(),
            "support": [e.to_dict() for e in self.support],
        }
        if self.scan is not None:
            data["scan"] = [{"alpha": a, "g": g} for a, g in self.scan]
        return data


@dataclass
class BestResponse:
    alpha: float
    value: float
    maximizers: List[Tuple[int, float]]
    u_right: float
    u_left: float
    policies: np.ndarray
    values: np.ndarray


def best_response(
    alpha: float, problem: EquilibriumProblem, evaluator: Optional[NarrativeEvaluator] = None
) -> BestResponse:
    """α에서 모든 (q, R) 서사의 최적 정책과 전역 최대화 집합"""
    evaluator = evaluator or NarrativeEvaluator(problem)
    lo, hi = problem.domain
    p0, p1 = evaluator.at(alpha)
    d, u = optimal_policies(p0, p1, problem.cost, problem.d_star, lo, hi)
    value = float(u.max())
    tol = problem.options.tie_tol
    maximizers = [(int(i), float(d[i])) for i in np.flatnonzero(u >= value - tol)]
    cut = float(np.clip(alpha, lo, hi))
    _, u_r = optimal_policies(p0, p1, problem.cost, problem.d_star, cut, hi)
    _, u_l = optimal_policies(p0, p1, problem.cost, problem.d_star, lo, cut)
    return BestResponse(
        alpha=alpha,
        value=value,
        maximizers=maximizers,
        u_right=float(u_r.max()),
        u_left=float(u_l.max()),
        policies=d,
        values=u,
    )


def _element(problem: EquilibriumProblem, index: int, d: float, weight: float,
             p0: np.ndarray, p1: np.ndarray) -> SupportElement:
    narrative = problem.narratives[index]
    tol = problem.options.re_tol
    return SupportElement(
        index=index,
        narrative=narrative.label,
        dag=narrative.dag.label,
        family=narrative.q.label,
        role=role_name(narrative.dag),
        d=float(d),
        weight=float(weight),
        p0=float(p0[index]),
        p1=float(p1[index]),
        side=policy_side(d, problem.d_star),
        rational=bool(abs(p0[index] - problem.mu) <= tol and abs(p1[index] - problem.mu) <= tol),
    )


def _rational_solution(problem: EquilibriumProblem, evaluator: NarrativeEvaluator) -> EquilibriumSolution:
    lo, hi = problem.domain
    alpha = float(np.clip(problem.d_star, lo, hi))
    p0, p1 = evaluator.at(alpha)
    count = evaluator.size
    support = [_element(problem, i, alpha, 1.0 / count, p0, p1) for i in range(count)]
    u_star = problem.mu - problem.cost(alpha - problem.d_star)
    logger.info(f"모든 서사가 합리적 기대 - α = d* = {alpha:.6f}")
    return EquilibriumSolution(
        alpha=alpha, support=support, u_star=u_star, kind=KIND_RATIONAL,
        d_star=problem.d_star, roots=[alpha],
    )


def _find_roots(evaluator: NarrativeEvaluator, problem: EquilibriumProblem) -> Tuple[List[float], List[Tuple[float, float]]]:
    lo, hi = problem.domain
    alphas = np.linspace(lo, hi, problem.options.scan_points)
    u_right, u_left = evaluator.side_values(alphas)
    g = u_right - u_left
    scan = [(float(a), float(v)) for a, v in zip(alphas, g)]

    roots: List[float] = [float(a) for a, v in zip(alphas, g) if v == 0.0]
    for i in range(len(alphas) - 1):
        if g[i] * g[i + 1] < 0.0:
            root = optimize.brentq(evaluator.gap, alphas[i], alphas[i + 1], xtol=problem.options.xtol)
            roots.append(float(root))
    roots.sort()
    unique: List[float] = []
    for r in roots:
        if not unique or r - unique[-1] > 1e-12:
            unique.append(r)
    return unique, scan


def _classify(problem: EquilibriumProblem, evaluator: NarrativeEvaluator, alpha: float) -> EquilibriumSolution:
    """근 α에서 지지 집합 구성 (순수 또는 두 정책 혼합)"""
    response = best_response(alpha, problem, evaluator)
    p0, p1 = evaluator.at(alpha)
    tol = problem.options.policy_tol
    d = response.policies

    at_alpha = [i for i, x in response.maximizers if abs(x - alpha) <= tol]
    if at_alpha:
        weight = 1.0 / len(at_alpha)
        support = [_element(problem, i, d[i], weight, p0, p1) for i in at_alpha]
        return EquilibriumSolution(
            alpha=alpha, support=support, u_star=response.value, kind=KIND_PURE, d_star=problem.d_star,
        )

    right = [i for i, x in response.maximizers if x > alpha]
    left = [i for i, x in response.maximizers if x < alpha]
    if not right or not left:
        raise SolverError(f"α={alpha:.10f}에서 양쪽 최적 정책을 찾지 못했습니다")

    tie = problem.options.tie_tol
    d_r = float(d[right[0]])
    d_l = float(d[left[0]])
    right_group = [i for i in right if abs(d[i] - d_r) <= tie]
    left_group = [i for i in left if abs(d[i] - d_l) <= tie]
    dropped = (len(right) - len(right_group)) + (len(left) - len(left_group))
    if dropped:
        logger.warning(f"서로 다른 정책의 동점 최대화 서사 {dropped}개는 지지 집합에서 제외")

    sigma_r = (alpha - d_l) / (d_r - d_l)
    support = [_element(problem, i, d[i], sigma_r / len(right_group), p0, p1) for i in right_group]
    support += [_element(problem, i, d[i], (1.0 - sigma_r) / len(left_group), p0, p1) for i in left_group]
    return EquilibriumSolution(
        alpha=alpha, support=support, u_star=response.value, kind=KIND_MIXED, d_star=problem.d_star,
    )


def solve(problem: EquilibriumProblem, include_scan: bool = False) -> EquilibriumSolution:
    """(α, σ) 균형 계산

    1) 모든 서사가 합리적 기대면 α = d*
    2) g(α) 스캔 후 부호 변화 구간마다 brentq로 근 정밀화
    3) 가장 작은 근에서 순수/혼합 균형 구성
    """
    evaluator = NarrativeEvaluator(problem)
    lo, hi = problem.domain
    logger.info(f"균형 탐색 시작: 서사 {evaluator.size}개, μ={problem.mu}, d*={problem.d_star}")

    samples = sorted({lo, 0.25, 0.5, 0.75, hi, float(np.clip(problem.d_star, lo, hi))})
    if bool(np.all(evaluator.rational_flags(samples))):
        solution = _rational_solution(problem, evaluator)
        if include_scan:
            _, solution.scan = _find_roots(evaluator, problem)
        return solution

    roots, scan = _find_roots(evaluator, problem)
    if not roots:
        logger.error("균형을 찾지 못했습니다 (g(α) 부호 변화 없음)")
        raise SolverError("no equilibrium found", scan)
    if len(roots) > 1:
        logger.warning(f"g(α)의 근이 여러 개입니다: {[round(r, 6) for r in roots]} - 가장 작은 근 사용")

    solution = _classify(problem, evaluator, roots[0])
    solution.roots = roots
    if include_scan:
        solution.scan = scan
    logger.info(f"균형 발견: α={solution.alpha:.6f} ({solution.kind}), 지지 {len(solution.support)}개")
    return solution


# === 진단 ===

@dataclass
class ConsistencyReport:
    optimality_gap: float
    consistency_residual: float
    weight_residual: float
    min_weight: float
    in_domain: bool
    passed: bool
    gaps: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "optimality_gap": self.optimality_gap,
            "consistency_residual": self.consistency_residual,
            "weight_residual": self.weight_residual,
            "min_weight": self.min_weight,
            "in_domain": self.in_domain,
            "passed": self.passed,
            "gaps": self.gaps,
        }


def consistency_check(
    solution: EquilibriumSolution, problem: EquilibriumProblem, tol: float = 1e-8
) -> ConsistencyReport:
    """두 균형 조건을 풀이 경로와 독립적으로 재검증"""
    evaluator = NarrativeEvaluator(problem)
    lo, hi = problem.domain
    alpha = solution.alpha
    response = best_response(alpha, problem, evaluator)
    p0, p1 = evaluator.at(alpha)

    gaps = []
    for element in solution.support:
        i = element.index
        value = p0[i] + (p1[i] - p0[i]) * element.d - problem.cost(element.d - problem.d_star)
        gaps.append({"index": i, "narrative": element.narrative, "d": element.d,
                     "gap": float(response.value - value)})

    weights = np.array([e.weight for e in solution.support]) if solution.support else np.zeros(1)
    mean_policy = sum(e.weight * e.d for e in solution.support)
    optimality_gap = max((g["gap"] for g in gaps), default=float("inf"))
    consistency_residual = abs(alpha - mean_policy)
    weight_residual = abs(float(weights.sum()) - 1.0)
    in_domain = all(lo - 1e-12 <= e.d <= hi + 1e-12 for e in solution.support) and lo - 1e-12 <= alpha <= hi + 1e-12
    passed = (
        optimality_gap <= tol
        and consistency_residual <= tol
        and weight_residual <= tol
        and float(weights.min()) > 0.0
        and in_domain
    )
    if not passed:
        logger.warning(
            f"균형 조건 위반: gap={optimality_gap:.3e}, residual={consistency_residual:.3e}"
        )
    return ConsistencyReport(
        optimality_gap=float(optimality_gap),
        consistency_residual=float(consistency_residual),
        weight_residual=weight_residual,
        min_weight=float(weights.min()),
        in_domain=in_domain,
        passed=passed,
        gaps=gaps,
    )


def side_value_profile(problem: EquilibriumProblem, alphas: Sequence[float]) -> pd.DataFrame:
    """α 격자 위 U_r, U_l, g 표"""
    evaluator = NarrativeEvaluator(problem)
    alphas = np.asarray(alphas, dtype=float)
    u_right, u_left = evaluator.side_values(alphas)
    return pd.DataFrame({"alpha": alphas, "u_right": u_right, "u_left": u_left, "g": u_right - u_left})


@dataclass
class RichnessReport:
    mirror_closed: bool
    distorted_everywhere: bool
    undistorted_alphas: List[float]

    @property
    def rich(self) -> bool:
        return self.mirror_closed and self.distorted_everywhere


def is_rich(problem: EquilibriumProblem, alphas: Optional[Sequence[float]] = None) -> RichnessReport:
    """풍부성: (i) 모든 α에서 p_R(y|a) ≠ μ 인 서사 존재 (격자 표본), (ii) Q가 거울상에 닫힘"""
    keys = {q.key() for q in problem.families}
    mirror_closed = all(mirror(q).key() in keys for q in problem.families)
    lo, hi = problem.domain
    grid = np.linspace(lo, hi, 33) if alphas is None else np.asarray(alphas, dtype=float)
    evaluator = NarrativeEvaluator(problem)
    p0, p1 = evaluator.outcomes(grid)
    tol = problem.options.re_tol
    distorted = np.any((np.abs(p0 - problem.mu) > tol) | (np.abs(p1 - problem.mu) > tol), axis=1)
    return RichnessReport(
        mirror_closed=mirror_closed,
        distorted_everywhere=bool(np.all(distorted)),
        undistorted_alphas=[float(a) for a, ok in zip(grid, distorted) if not ok],
    )


def polarization_summary(solution: EquilibriumSolution, d_star: Optional[float] = None) -> Dict[str, Any]:
    """지지 정책이 d* 좌우에 몇 개씩 있는지"""
    d_star = solution.d_star if d_star is None else d_star
    policies = [d for d, _ in solution.policy_weights()]
    left = [d for d in policies if d < d_star - 1e-9]
    right = [d for d in policies if d > d_star + 1e-9]
    return {
        "policies": policies,
        "left": len(left),
        "right": len(right),
        "at_ideal": len(policies) - len(left) - len(right),
        "polarized": bool(left and right),
    }
