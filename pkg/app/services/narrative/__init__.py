"""
서사 신념 서비스
"""
from app.services.narrative.belief import (
    Belief,
    CostFunction,
    Narrative,
    factorize,
    factorize_batch,
    group_by_belief,
    gross_utility,
    is_rational_expectations,
    marginal_distortion,
    net_utility,
    nsqd_deviation,
    ordinal_rewrite_check,
    outcome_batch,
    outcome_conditional,
    status_quo_distortion,
)
from app.services.narrative.refutation import CIViolation, ci_violations, independence_deviation

__all__ = [
    "Belief",
    "CIViolation",
    "CostFunction",
    "Narrative",
    "ci_violations",
    "factorize",
    "factorize_batch",
    "group_by_belief",
    "gross_utility",
    "independence_deviation",
    "is_rational_expectations",
    "marginal_distortion",
    "net_utility",
    "nsqd_deviation",
    "ordinal_rewrite_check",
    "outcome_batch",
    "outcome_conditional",
    "status_quo_distortion",
]
