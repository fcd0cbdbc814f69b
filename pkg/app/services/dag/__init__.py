"""
인과 DAG 서비스
"""
from app.services.dag.causal_dag import (
    COLLIDER,
    LEVER,
    CausalDag,
    chain,
    enumerate_dags,
    is_linear,
    is_perfect,
    is_structurally_rational,
    role_name,
    validate,
)
from app.services.dag.junction_tree import (
    JunctionTree,
    junction_tree,
    maximal_cliques,
    verify_running_intersection,
)
from app.services.dag.separation import IndependenceStatement, d_separated, local_independencies

__all__ = [
    "COLLIDER",
    "LEVER",
    "CausalDag",
    "IndependenceStatement",
    "JunctionTree",
    "chain",
    "d_separated",
    "enumerate_dags",
    "is_linear",
    "is_perfect",
    "is_structurally_rational",
    "junction_tree",
    "local_independencies",
    "maximal_cliques",
    "role_name",
    "validate",
    "verify_running_intersection",
]
