"""
d-분리 판정과 국소 마르코프 독립 명제
"""
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List

import networkx as nx

from app.core.exceptions import DomainError
from app.services.dag.causal_dag import CausalDag


@dataclass(frozen=True)
class IndependenceStatement:
    """left ⊥ right | given"""

    left: FrozenSet[int]
    right: FrozenSet[int]
    given: FrozenSet[int]

    def __str__(self) -> str:
        def fmt(s):
            return "{" + ",".join(str(i) for i in sorted(s)) + "}"

        return f"{fmt(self.left)} ⊥ {fmt(self.right)} | {fmt(self.given)}"


def d_separated(dag: CausalDag, A: Iterable[int], B: Iterable[int], Z: Iterable[int]) -> bool:
    """조상 부분그래프의 도덕 그래프(moral graph)에서 Z를 제거한 뒤 연결성으로 판정"""
    A, B, Z = frozenset(A), frozenset(B), frozenset(Z)
    if A & B or A & Z or B & Z:
        raise DomainError(f"A, B, Z가 서로소가 아닙니다: {sorted(A)}, {sorted(B)}, {sorted(Z)}")
    unknown = (A | B | Z) - set(dag.nodes)
    if unknown:
        raise DomainError(f"DAG에 없는 노드: {sorted(unknown)}")
    if not A or not B:
        return True

    relevant = set(A | B | Z)
    for node in A | B | Z:
        relevant |= dag.ancestors(node)
    moral = nx.moral_graph(dag.graph.subgraph(relevant))
    moral.remove_nodes_from(Z)
    return not any(nx.has_path(moral, a, b) for a in A for b in B)


def local_independencies(dag: CausalDag) -> List[IndependenceStatement]:
    """각 노드 i에 대해 x_i ⊥ ND(i)∖R(i) | R(i)"""
    statements = []
    for node in dag.nodes:
        parents = frozenset(dag.parents(node))
        rest = frozenset(dag.nodes) - dag.descendants(node) - parents - {node}
        if rest:
            statements.append(IndependenceStatement(frozenset({node}), rest, parents))
    return statements
