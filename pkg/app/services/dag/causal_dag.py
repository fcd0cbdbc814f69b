"""
인과 DAG 표현
구조 판정 (완전성, 선형성, 합리적 기대 구조) 및 DAG 열거
"""
import itertools
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from app.core.exceptions import DomainError, ValidationError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


@dataclass(frozen=True)
class CausalDag:
    """서사의 인과 모델 (N, R)

    nodes는 정렬된 노드 튜플, edges는 정렬된 (부모, 자식) 튜플.
    비순환성 등 구조 제약은 생성 시가 아니라 validate()에서 진단한다.
    """

    nodes: Tuple[int, ...]
    edges: Tuple[Edge, ...] = ()

    def __post_init__(self):
        nodes = tuple(sorted(set(int(i) for i in self.nodes)))
        edges = tuple(sorted(set((int(i), int(j)) for i, j in self.edges)))
        if not nodes:
            raise ValidationError("DAG 노드 집합이 비어 있습니다")
        for i, j in edges:
            if i not in nodes or j not in nodes:
                raise ValidationError(f"간선 ({i},{j})의 끝점이 노드 집합 {list(nodes)}에 없습니다")
            if i == j:
                raise ValidationError(f"자기 루프 간선: ({i},{j})")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)

    # === 직렬화 ===

    @classmethod
    def from_spec(cls, spec: Dict[str, Any]) -> "CausalDag":
        """{"nodes": [...], "edges": [[i, j], ...]} 형식에서 생성"""
        if not isinstance(spec, dict) or "nodes" not in spec:
            raise ValidationError("DAG 명세에는 'nodes' 필드가 필요합니다")
        try:
            nodes = [int(i) for i in spec["nodes"]]
            edges = [(int(e[0]), int(e[1])) for e in spec.get("edges", [])]
        except (TypeError, ValueError, IndexError) as e:
            raise ValidationError(f"DAG 명세 파싱 실패: {e}") from e
        if any(len(e) != 2 for e in spec.get("edges", [])):
            raise ValidationError("간선은 [부모, 자식] 쌍이어야 합니다")
        return cls(nodes=tuple(nodes), edges=tuple(edges))

    def to_spec(self) -> Dict[str, Any]:
        return {"nodes": list(self.nodes), "edges": [list(e) for e in self.edges]}

    @property
    def label(self) -> str:
        """정규 텍스트 표기, 예: {1,2,3}:1>2,2>3"""
        nodes = ",".join(str(i) for i in self.nodes)
        edges = ",".join(f"{i}>{j}" for i, j in self.edges)
        return f"{{{nodes}}}:{edges}"

    def __str__(self) -> str:
        return self.label

    # === 그래프 질의 ===

    @cached_property
    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.edges)
        return g

    def skeleton(self) -> nx.Graph:
        return self.graph.to_undirected()

    @property
    def outcome(self) -> int:
        """결과 노드 n (유효한 DAG에서 최대 노드)"""
        return self.nodes[-1]

    def parents(self, node: int) -> Tuple[int, ...]:
        return tuple(sorted(self.graph.predecessors(node)))

    def children(self, node: int) -> Tuple[int, ...]:
        return tuple(sorted(self.graph.successors(node)))

    def ancestors(self, node: int) -> FrozenSet[int]:
        return frozenset(nx.ancestors(self.graph, node))

    def descendants(self, node: int) -> FrozenSet[int]:
        return frozenset(nx.descendants(self.graph, node))

    def has_directed_path(self, source: int, target: int) -> bool:
        return source != target and nx.has_path(self.graph, source, target)

    def adjacent(self, i: int, j: int) -> bool:
        return self.graph.has_edge(i, j) or self.graph.has_edge(j, i)

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.graph)

    def is_complete(self) -> bool:
        k = len(self.nodes)
        return len(self.edges) == k * (k - 1) // 2

    def restrict(self, nodes: Iterable[int]) -> "CausalDag":
        keep = set(nodes)
        return CausalDag(
            nodes=tuple(keep),
            edges=tuple((i, j) for i, j in self.edges if i in keep and j in keep),
        )


def chain(*nodes: int) -> CausalDag:
    """선형 사슬 nodes[0] → nodes[1] → …"""
    return CausalDag(nodes=tuple(nodes), edges=tuple(zip(nodes, nodes[1:])))


LEVER = CausalDag(nodes=(1, 2, 3), edges=((1, 2), (2, 3)))
COLLIDER = CausalDag(nodes=(1, 2, 3), edges=((1, 3), (2, 3)))


# === 구조 판정 ===

def validate(dag: CausalDag, n: int) -> List[str]:
    """구조 제약 위반 목록 (빈 목록이면 유효)"""
    violations = []
    out_of_range = [i for i in dag.nodes if not 1 <= i <= n]
    if out_of_range:
        violations.append(f"nodes out of range 1..{n}: {out_of_range}")
    if 1 not in dag.nodes:
        violations.append("missing node 1")
    if n not in dag.nodes:
        violations.append(f"missing node {n}")
    if not dag.is_acyclic():
        violations.append("cycle")
    elif 1 in dag.nodes and n in dag.nodes and dag.has_directed_path(n, 1):
        violations.append("path n→1")
    return violations


def is_perfect(dag: CausalDag) -> bool:
    """공통 자식을 가진 두 부모가 항상 연결되어 있는지"""
    for node in dag.nodes:
        for i, j in itertools.combinations(dag.parents(node), 2):
            if not dag.adjacent(i, j):
                return False
    return True


def is_linear(dag: CausalDag) -> bool:
    """노드 1만 조상 노드, n만 말단 노드, 나머지는 부모가 정확히 하나"""
    roots = [i for i in dag.nodes if not dag.parents(i)]
    leaves = [i for i in dag.nodes if not dag.children(i)]
    if roots != [1] or leaves != [dag.outcome]:
        return False
    return all(len(dag.parents(i)) == 1 for i in dag.nodes if i != 1)


def is_structurally_rational(dag: CausalDag) -> bool:
    """모든 객관적 분포에서 p_R(y|a) = μ 가 보장되는 구조인지

    완전 DAG이거나, 노드 1이 조상 노드이고 1→n 유향 경로가 없으며
    n의 조상 부분그래프가 완전 DAG 조건을 만족하는 경우.
    """
    if dag.is_complete():
        return True
    n = dag.outcome
    if dag.parents(1) or dag.has_directed_path(1, n):
        return False
    return is_perfect(dag.restrict(dag.ancestors(n) | {n}))


def role_name(dag: CausalDag) -> Optional[str]:
    """3노드 서사 이름: lever (1→2→3), opportunity (1→3←2)"""
    if dag == LEVER:
        return "lever"
    if dag == COLLIDER:
        return "opportunity"
    return None


# === DAG 열거 ===

def _acyclic_masks(k: int, parent_masks: Sequence[int]) -> bool:
    remaining = (1 << k) - 1
    while remaining:
        ready = [v for v in range(k) if remaining >> v & 1 and not parent_masks[v] & remaining]
        if not ready:
            return False
        for v in ready:
            remaining &= ~(1 << v)
    return True


def _reaches(k: int, child_masks: Sequence[int], source: int, target: int) -> bool:
    seen = 1 << source
    frontier = [source]
    while frontier:
        v = frontier.pop()
        nxt = child_masks[v] & ~seen
        if nxt >> target & 1:
            return True
        seen |= nxt
        frontier.extend(u for u in range(k) if nxt >> u & 1)
    return False


@lru_cache(maxsize=None)
def _dags_on(nodes: Tuple[int, ...]) -> Tuple[CausalDag, ...]:
    """노드 집합 위 유효 DAG 전체 (비순환, n→1 경로 없음)"""
    k = len(nodes)
    pairs = list(itertools.combinations(range(k), 2))
    first, last = 0, k - 1
    found = []
    for states in itertools.product((0, 1, 2), repeat=len(pairs)):
        parent_masks = [0] * k
        child_masks = [0] * k
        edges = []
        for (u, v), s in zip(pairs, states):
            if s == 0:
                continue
            src, dst = (u, v) if s == 1 else (v, u)
            parent_masks[dst] |= 1 << src
            child_masks[src] |= 1 << dst
            edges.append((nodes[src], nodes[dst]))
        if not _acyclic_masks(k, parent_masks):
            continue
        if _reaches(k, child_masks, last, first):
            continue
        found.append(CausalDag(nodes=nodes, edges=tuple(edges)))
    found.sort(key=lambda d: d.edges)
    return tuple(found)


def enumerate_dags(
    n: int,
    max_nodes: Optional[int] = None,
    perfect_only: bool = False,
    action_ancestral: bool = False,
    exclude: Iterable[CausalDag] = (),
) -> List[CausalDag]:
    """{1,n}을 포함하고 노드 수 ≤ max_nodes 인 모든 유효 DAG

    정규 순서: 노드 수 오름차순, 같은 노드 수에서는 중간 노드 조합의 사전순,
    같은 노드 집합 안에서는 간선 튜플의 사전순. 시나리오 라벨과 지지 인덱스가
    이 순서를 따른다.
    """
    max_nodes = n if max_nodes is None else max_nodes
    if max_nodes < 2:
        raise DomainError(f"max_nodes는 2 이상이어야 합니다: {max_nodes}")
    if max_nodes > n:
        raise DomainError(f"max_nodes({max_nodes})가 n({n})보다 큽니다")
    excluded = set(exclude)
    middle = range(2, n)
    result = []
    for size in range(0, max_nodes - 1):
        for extra in itertools.combinations(middle, size):
            nodes = (1,) + extra + (n,)
            for dag in _dags_on(nodes):
                if action_ancestral and dag.parents(1):
                    continue
                if perfect_only and not is_perfect(dag):
                    continue
                if dag in excluded:
                    continue
                result.append(dag)
    logger.debug(f"DAG 열거 완료: n={n}, max_nodes={max_nodes}, {len(result)}개")
    return result
