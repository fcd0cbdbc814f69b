"""
완전(perfect) DAG의 극대 클리크와 정션 트리
"""
import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Tuple

import networkx as nx

from app.core.exceptions import UnsupportedStructureError
from app.services.dag.causal_dag import CausalDag, is_perfect

logger = logging.getLogger(__name__)

Clique = Tuple[int, ...]


@dataclass(frozen=True)
class JunctionTree:
    """클리크 트리 (연결 성분마다 하나의 트리인 숲)

    Attributes:
        cliques: 정규 순서의 극대 클리크
        tree_edges: 클리크 인덱스 쌍 (i < j)
        separators: tree_edges와 같은 순서의 교집합
    """

    cliques: Tuple[Clique, ...]
    tree_edges: Tuple[Tuple[int, int], ...]
    separators: Tuple[Clique, ...]

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(len(self.cliques)))
        g.add_edges_from(self.tree_edges)
        return g

    def path(self, i: int, j: int) -> Optional[List[int]]:
        """트리 위 클리크 i → j 경로 (다른 성분이면 None)"""
        try:
            return nx.shortest_path(self.graph, i, j)
        except nx.NetworkXNoPath:
            return None

    def containing(self, node: int) -> List[int]:
        return [k for k, c in enumerate(self.cliques) if node in c]

    def to_dict(self) -> dict:
        return {
            "cliques": [list(c) for c in self.cliques],
            "tree_edges": [list(e) for e in self.tree_edges],
            "separators": [list(s) for s in self.separators],
        }


def _require_perfect(dag: CausalDag) -> None:
    if not is_perfect(dag):
        raise UnsupportedStructureError(f"완전 DAG가 아닙니다: {dag.label}")


def maximal_cliques(dag: CausalDag) -> List[Clique]:
    """골격 그래프의 극대 클리크 (정규 순서)"""
    _require_perfect(dag)
    return sorted(tuple(sorted(c)) for c in nx.find_cliques(dag.skeleton()))


def verify_running_intersection(tree: JunctionTree) -> List[str]:
    """트리 조건과 running intersection 성질 위반 목록"""
    violations = []
    g = tree.graph
    if not nx.is_forest(g):
        violations.append("clique graph is not a forest")
        return violations
    for i, j in itertools.combinations(range(len(tree.cliques)), 2):
        shared = set(tree.cliques[i]) & set(tree.cliques[j])
        if not shared:
            continue
        path = tree.path(i, j)
        if path is None:
            violations.append(f"cliques {i},{j} share {sorted(shared)} but are disconnected")
            continue
        for k in path[1:-1]:
            if not shared <= set(tree.cliques[k]):
                violations.append(
                    f"clique {k} on path {i}-{j} misses {sorted(shared - set(tree.cliques[k]))}"
                )
    return violations


def junction_tree(dag: CausalDag) -> JunctionTree:
    """교집합 크기 가중 최대 신장 트리로 정션 트리 구성 후 검증"""
    cliques = maximal_cliques(dag)
    clique_graph = nx.Graph()
    clique_graph.add_nodes_from(range(len(cliques)))
    for i, j in itertools.combinations(range(len(cliques)), 2):
        weight = len(set(cliques[i]) & set(cliques[j]))
        if weight:
            clique_graph.add_edge(i, j, weight=weight)

    spanning = nx.maximum_spanning_tree(clique_graph, weight="weight")
    tree_edges = tuple(sorted(tuple(sorted(e)) for e in spanning.edges()))
    separators = tuple(
        tuple(sorted(set(cliques[i]) & set(cliques[j]))) for i, j in tree_edges
    )
    tree = JunctionTree(cliques=tuple(cliques), tree_edges=tree_edges, separators=separators)

    violations = verify_running_intersection(tree)
    if violations:
        logger.error(f"정션 트리 검증 실패: {dag.label} - {violations}")
        raise UnsupportedStructureError(f"정션 트리 검증 실패: {'; '.join(violations)}")
    return tree
