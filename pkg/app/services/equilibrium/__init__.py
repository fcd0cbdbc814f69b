"""
균형 계산 서비스
"""
from app.services.equilibrium.policy import Policy, best_policy, optimal_policies, optimal_policy
from app.services.equilibrium.problem import EquilibriumProblem, NarrativeEvaluator, SolverOptions
from app.services.equilibrium.search import (
    SearchResult,
    collider_outcome,
    lever_bound,
    lever_codings,
    lever_optimal_patterns,
    lever_outcome,
    opportunity_bound,
    optimal_narrative_search,
)
from app.services.equilibrium.solver import (
    KIND_MIXED,
    KIND_PURE,
    KIND_RATIONAL,
    BestResponse,
    ConsistencyReport,
    EquilibriumSolution,
    RichnessReport,
    SupportElement,
    best_response,
    consistency_check,
    is_rich,
    polarization_summary,
    policy_side,
    side_value_profile,
    solve,
)

__all__ = [
    "KIND_MIXED",
    "KIND_PURE",
    "KIND_RATIONAL",
    "BestResponse",
    "ConsistencyReport",
    "EquilibriumProblem",
    "EquilibriumSolution",
    "NarrativeEvaluator",
    "Policy",
    "RichnessReport",
    "SearchResult",
    "SolverOptions",
    "SupportElement",
    "best_policy",
    "best_response",
    "collider_outcome",
    "consistency_check",
    "is_rich",
    "lever_bound",
    "lever_codings",
    "lever_optimal_patterns",
    "lever_outcome",
    "opportunity_bound",
    "optimal_narrative_search",
    "optimal_policies",
    "optimal_policy",
    "polarization_summary",
    "policy_side",
    "side_value_profile",
    "solve",
]
