"""
내장 시나리오의 닫힌 형태 검증 오라클
"""
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from scipy.optimize import brentq

from app.services.equilibrium import EquilibriumSolution, lever_bound, lever_optimal_patterns
from app.services.scenarios.schema import Comparison, ScenarioConfig

Oracle = Callable[[ScenarioConfig, EquilibriumSolution], List[Comparison]]

# 기회 서사의 p(x_2=1 | a, y) 패턴 (p00, p01, p10, p11)
OPPORTUNITY_HAWK = (1.0, 1.0, 0.0, 1.0)    # y + (1−a)(1−y)
OPPORTUNITY_DOVE = (0.0, 1.0, 1.0, 1.0)    # y + a(1−y)


def _numeric(quantity: str, expected: float, actual: Optional[float], tolerance: float) -> Comparison:
    if actual is None:
        return Comparison(quantity=quantity, expected=expected, actual=None, tolerance=tolerance, passed=False)
    delta = abs(actual - expected)
    return Comparison(
        quantity=quantity, expected=expected, actual=actual, delta=delta, tolerance=tolerance,
        passed=delta <= tolerance,
    )


def _flag(quantity: str, expected: str, actual: str, passed: bool) -> Comparison:
    return Comparison(quantity=quantity, expected=expected, actual=actual, passed=passed)


def _sides(solution: EquilibriumSolution) -> Tuple[Optional[float], Optional[float], float]:
    """(최대 정책, 최소 정책, 최대 정책 쪽 가중치)"""
    weights = solution.policy_weights()
    if not weights:
        return None, None, 0.0
    return weights[0][0], weights[-1][0], weights[0][1]


def _matches_pattern(family_probs: Sequence[float], patterns: Sequence[Sequence[float]], tol: float = 1e-3) -> bool:
    return any(all(abs(a - b) <= tol for a, b in zip(family_probs, p)) for p in patterns)


def _complement(pattern: Sequence[float]) -> Tuple[float, ...]:
    return tuple(1.0 - v for v in pattern)


def _pattern_check(
    solution: EquilibriumSolution, side: str, patterns: Sequence[Sequence[float]], role: str
) -> Comparison:
    """side 쪽 지지 서사가 모두 role DAG이고 허용 패턴(또는 x_2 재표기) 중 하나인지"""
    elements = [e for e in solution.support if e.side == side]
    accepted = [tuple(p) for p in patterns] + [_complement(p) for p in patterns]
    labels = []
    ok = bool(elements)
    for element in elements:
        labels.append(element.family or "")
        probs = _family_probs(element.family)
        if element.role != role or probs is None or not _matches_pattern(probs, accepted):
            ok = False
    shown = sorted({tuple(int(round(v)) for v in p) for p in patterns})
    expected = f"{role} with p(x2=1|a,y) in {shown} up to relabeling"
    return _flag(f"{side}_narratives", expected, ", ".join(labels) or "none", ok)


def _family_probs(label: Optional[str]) -> Optional[Tuple[float, ...]]:
    """corner:i-j-k-l 라벨에서 n=3 패턴 복원"""
    if not label or not label.startswith("corner:"):
        return None
    parts = label.split(":", 1)[1].split("-")
    if len(parts) != 4:
        return None
    return tuple(float(p) for p in parts)


def claim1_oracle(config: ScenarioConfig, solution: EquilibriumSolution) -> List[Comparison]:
    k = config.cost.k
    alpha = 2.0 - math.sqrt(2.0)
    d_hawk = 0.5 + math.sqrt(2.0) / (8.0 * k)
    d_dove = 0.5 - math.sqrt(2.0) / (8.0 * k)
    weight_hawk = (alpha - d_dove) / (d_hawk - d_dove)
    d_r, d_l, w_r = _sides(solution)
    roles = {e.side: e.role for e in solution.support}
    return [
        _numeric("alpha", alpha, solution.alpha, 1e-3),
        _numeric("d_hawk", d_hawk, d_r, 1e-3),
        _numeric("d_dove", d_dove, d_l, 1e-3),
        _numeric("weight_hawk", weight_hawk, w_r, 1e-3),
        _flag("hawk_role", "opportunity", str(roles.get("hawk")), roles.get("hawk") == "opportunity"),
        _flag("dove_role", "lever", str(roles.get("dove")), roles.get("dove") == "lever"),
    ]


def claim2_oracle(config: ScenarioConfig, solution: EquilibriumSolution) -> List[Comparison]:
    k = config.cost.k
    root = math.sqrt(9.0 + 2.0 / k)
    alpha = 1.25 - root / 4.0
    t = 0.75 + root / 4.0
    d_lever = 0.5 - 1.0 / (4.0 * k * t)
    d_rational = config.d_star
    weight_rational = (alpha - d_lever) / (d_rational - d_lever)
    d_r, d_l, w_r = _sides(solution)
    right = [e for e in solution.support if abs(e.d - (d_r or 0.0)) <= 1e-9]
    left_roles = {e.role for e in solution.support if abs(e.d - (d_l or 0.0)) <= 1e-9}
    return [
        _numeric("alpha", alpha, solution.alpha, 1e-3),
        _numeric("d_lever", d_lever, d_l, 1e-3),
        _numeric("d_rational", d_rational, d_r, 1e-3),
        _numeric("weight_rational", weight_rational, w_r, 1e-3),
        _numeric("weight_lever", 1.0 - weight_rational, 1.0 - w_r, 1e-3),
        _flag("lever_role", "lever", ",".join(sorted(str(r) for r in left_roles)), left_roles == {"lever"}),
        _flag(
            "rational_side",
            "rational expectations",
            "rational expectations" if right and all(e.rational for e in right) else "distorted",
            bool(right) and all(e.rational for e in right),
        ),
    ]


def _lever_slopes(alpha: float, mu: float) -> Tuple[float, float]:
    """NSQD 레버 서사의 정책 기울기 (매파 p1−p0, 비둘기파 p0−p1)"""
    hawk = (lever_bound(alpha, mu, target=1) - mu) / (1.0 - alpha)
    dove = (lever_bound(alpha, mu, target=0) - mu) / alpha
    return hawk, dove


def _short_alpha(config: ScenarioConfig) -> Optional[float]:
    """2차 비용에서 α − d* = (s_r − s_l)/(4k)의 내부 해"""
    k, mu = config.cost.k, config.mu

    def gap(alpha: float) -> float:
        hawk, dove = _lever_slopes(alpha, mu)
        return alpha - config.d_star - (hawk - dove) / (4.0 * k)

    lo, hi = config.epsilon, 1.0 - config.epsilon
    if gap(lo) * gap(hi) > 0:
        return None
    return float(brentq(gap, lo, hi, xtol=1e-14))


def short_narratives_oracle(config: ScenarioConfig, solution: EquilibriumSolution) -> List[Comparison]:
    """레버 대 레버 균형: μ = 1/2이면 두 기울기가 같아 α = d*"""
    mu, k = config.mu, config.cost.k
    alpha = _short_alpha(config)
    if alpha is None:
        return [_flag("alpha", "interior root", f"{solution.alpha:.6f}", False)]

    hawk_slope, dove_slope = _lever_slopes(alpha, mu)
    d_hawk = min(config.d_star + hawk_slope / (2.0 * k), 1.0 - config.epsilon)
    d_dove = max(config.d_star - dove_slope / (2.0 * k), config.epsilon)
    strong_hawk = lever_bound(alpha, mu, target=1)
    strong_dove = lever_bound(alpha, mu, target=0)
    d_r, d_l, w_r = _sides(solution)
    hawks = [e for e in solution.support if e.side == "hawk"]
    doves = [e for e in solution.support if e.side == "dove"]
    hawk = hawks[0] if hawks else None
    dove = doves[0] if doves else None
    return [
        _numeric("alpha", alpha, solution.alpha, 1e-4),
        _numeric("d_hawk", d_hawk, d_r, 1e-3),
        _numeric("d_dove", d_dove, d_l, 1e-3),
        _numeric("weight_hawk", (alpha - d_dove) / (d_hawk - d_dove), w_r, 1e-3),
        _numeric("hawk_p_y1_given_a1", strong_hawk, hawk.p1 if hawk else None, 1e-4),
        _numeric("hawk_p_y1_given_a0", (mu - alpha * strong_hawk) / (1.0 - alpha), hawk.p0 if hawk else None, 1e-4),
        _numeric("dove_p_y1_given_a0", strong_dove, dove.p0 if dove else None, 1e-4),
        _numeric("dove_p_y1_given_a1", (mu - (1.0 - alpha) * strong_dove) / alpha, dove.p1 if dove else None, 1e-4),
        _pattern_check(solution, "hawk", lever_optimal_patterns(solution.alpha, mu, target=1, tol=1e-4), "lever"),
        _pattern_check(solution, "dove", lever_optimal_patterns(solution.alpha, mu, target=0, tol=1e-4), "lever"),
    ]


def opportunity_oracle(config: ScenarioConfig, solution: EquilibriumSolution) -> List[Comparison]:
    eps = config.epsilon
    d_r, d_l, _ = _sides(solution)
    return [
        _numeric("alpha", 0.5, solution.alpha, 1e-3),
        _flag("d_hawk", f">= {1.0 - eps - 1e-6}", str(d_r), d_r is not None and d_r >= 1.0 - eps - 1e-6),
        _flag("d_dove", f"<= {eps + 1e-6}", str(d_l), d_l is not None and d_l <= eps + 1e-6),
        _pattern_check(solution, "hawk", [OPPORTUNITY_HAWK], "opportunity"),
        _pattern_check(solution, "dove", [OPPORTUNITY_DOVE], "opportunity"),
    ]


ORACLES: Dict[str, Oracle] = {
    "claim1": claim1_oracle,
    "claim2": claim2_oracle,
    "short-narratives": short_narratives_oracle,
    "opportunity": opportunity_oracle,
}
