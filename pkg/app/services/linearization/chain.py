"""
완전 DAG 신념의 선형 사슬 환원
클리크 인수분해 → 분리집합 변수 사슬 → 이진화
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.core.exceptions import DomainError, ValidationError
from app.services.dag import CausalDag, JunctionTree, chain, junction_tree, validate
from app.services.narrative import Belief, factorize
from app.services.probability import (
    JointDistribution,
    build_joint,
    decode,
    flatten_tensor,
    marginal,
    marginal_tensor,
    perturb_full_support,
)

logger = logging.getLogger(__name__)

Nodes = Tuple[int, ...]

KIND_PROPER = "proper"
KIND_SAME_CLIQUE = "same_clique"
KIND_NO_PATH = "no_path"


def _framed(p: JointDistribution, nodes: Sequence[int], frame: Nodes) -> np.ndarray:
    tensor = marginal_tensor(p, nodes)
    present = set(nodes)
    return tensor.reshape(tuple(2 if node in present else 1 for node in frame))


def clique_factor_belief(p: JointDistribution, dag: CausalDag) -> Belief:
    """p_R = Π_C p(x_C) / Π_S p(x_S) (정션 트리 공식)"""
    violations = validate(dag, p.n)
    if violations:
        raise ValidationError(f"유효하지 않은 DAG {dag.label}: {', '.join(violations)}")
    tree = junction_tree(dag)
    frame = dag.nodes
    tensor = np.ones((2,) * len(frame))
    for clique in tree.cliques:
        tensor = tensor * _framed(p, clique, frame)
    for separator in tree.separators:
        tensor = tensor / _framed(p, separator, frame)
    return Belief(nodes=frame, tensor=tensor, mu=p.mu)


def transition(p: JointDistribution, source: Nodes, target: Nodes) -> np.ndarray:
    """p(target | source) 전이 행렬 (겹치는 변수 허용)

    행은 source 할당, 열은 target 할당 (각각 첫 변수가 최하위 비트).
    """
    union = tuple(sorted(set(source) | set(target)))
    joint = marginal_tensor(p, union)
    src_marginal = marginal_tensor(p, source)
    matrix = np.zeros((2 ** len(source), 2 ** len(target)))
    for u in range(2 ** len(source)):
        u_bits = dict(zip(source, decode(u, len(source))))
        denominator = float(src_marginal[tuple(u_bits[s] for s in source)]) if source else 1.0
        if denominator <= 0:
            raise DomainError(f"확률 0인 조건 사건: {source}={u}")
        for v in range(2 ** len(target)):
            v_bits = dict(zip(target, decode(v, len(target))))
            if any(u_bits[s] != v_bits[s] for s in set(source) & set(target)):
                continue
            assignment = {**u_bits, **v_bits}
            matrix[u, v] = joint[tuple(assignment[node] for node in union)] / denominator
    return matrix


@dataclass(frozen=True, eq=False)
class ChainReduction:
    """a → z_2 → … → z_m → y 사슬 환원 결과

    separators[k]는 z_{k+2} = x_{C_{k+2} ∩ C_{k+1}}. conditionals는
    p(z_2|a), p(z_3|z_2), …, p(y|z_m) 순서의 전이 행렬.
    """

    kind: str
    dag: CausalDag
    tree: JunctionTree
    path_cliques: Tuple[Nodes, ...]
    separators: Tuple[Nodes, ...]
    conditionals: Tuple[np.ndarray, ...]
    z_star: Tuple[int, ...]
    pruned: Tuple[int, ...]
    target: np.ndarray
    joint: JointDistribution = field(repr=False)

    @property
    def m(self) -> int:
        return len(self.path_cliques)

    @property
    def chain_length(self) -> int:
        """사슬 노드 수 (a, z_2..z_m, y)"""
        return len(self.separators) + 2

    @property
    def arities(self) -> Tuple[int, ...]:
        return tuple(2 ** len(s) for s in self.separators)

    def chain_outcome(self) -> np.ndarray:
        return chain_outcome(self)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "dag": self.dag.to_spec(),
            "junction_tree": self.tree.to_dict(),
            "path_cliques": [list(c) for c in self.path_cliques],
            "separators": [list(s) for s in self.separators],
            "arities": list(self.arities),
            "conditionals": [c.tolist() for c in self.conditionals],
            "z_star": list(self.z_star),
            "pruned": list(self.pruned),
            "chain_length": self.chain_length,
            "chain_outcome": self.chain_outcome().tolist(),
            "belief_outcome": self.target.tolist(),
        }


def chain_outcome(reduction: ChainReduction) -> np.ndarray:
    """Σ_z p(z_2|a) Π p(z_{k+1}|z_k) p(y|z_m) 를 행렬곱으로 계산한 [a][y] 표"""
    result = np.eye(2)
    for matrix in reduction.conditionals:
        result = result @ matrix
    return result


def _select_path(tree: JunctionTree, first: int, last: int) -> Tuple[str, List[int]]:
    """노드 1과 n을 담는 클리크 중 트리 거리가 최소인 쌍 (정규 순서로 동점 처리)"""
    best: Optional[Tuple[int, int, int, List[int]]] = None
    for i in tree.containing(first):
        for j in tree.containing(last):
            if i == j:
                return KIND_SAME_CLIQUE, [i]
            path = tree.path(i, j)
            if path is None:
                continue
            candidate = (len(path), i, j, path)
            if best is None or candidate[:3] < best[:3]:
                best = candidate
    if best is None:
        return KIND_NO_PATH, []
    return KIND_PROPER, best[3]


def _most_probable(p: JointDistribution, nodes: Nodes) -> int:
    return int(np.argmax(marginal(p, nodes)))


def reduce_to_chain(p: JointDistribution, dag: CausalDag) -> ChainReduction:
    """완전 DAG 신념을 분리집합 변수 위 선형 사슬로 환원 (p_R(y|a) 보존)"""
    violations = validate(dag, p.n)
    if violations:
        raise ValidationError(f"유효하지 않은 DAG {dag.label}: {', '.join(violations)}")
    tree = junction_tree(dag)
    first, last = 1, p.n
    target = factorize(p, dag).outcome_conditional
    kind, path = _select_path(tree, first, last)

    if kind != KIND_PROPER:
        if kind == KIND_SAME_CLIQUE:
            matrix = transition(p, (first,), (last,))
        else:
            matrix = np.tile(marginal(p, (last,)), (2, 1))
        logger.debug(f"퇴화 사슬 ({kind}): {dag.label}")
        return ChainReduction(
            kind=kind,
            dag=dag,
            tree=tree,
            path_cliques=tuple(tree.cliques[k] for k in path),
            separators=(),
            conditionals=(matrix,),
            z_star=(),
            pruned=tuple(i for i in dag.nodes if i not in (first, last)),
            target=target,
            joint=p,
        )

    cliques = [tree.cliques[k] for k in path]
    separators = tuple(
        tuple(sorted(set(cliques[k]) & set(cliques[k - 1]))) for k in range(1, len(cliques))
    )
    stages = ((first,),) + separators + ((last,),)
    conditionals = tuple(transition(p, stages[k], stages[k + 1]) for k in range(len(stages) - 1))
    kept = set().union(*separators) | {first, last}
    pruned = tuple(i for i in dag.nodes if i not in kept)

    reduction = ChainReduction(
        kind=KIND_PROPER,
        dag=dag,
        tree=tree,
        path_cliques=tuple(cliques),
        separators=separators,
        conditionals=conditionals,
        z_star=tuple(_most_probable(p, s) for s in separators),
        pruned=pruned,
        target=target,
        joint=p,
    )
    logger.debug(
        f"사슬 환원: {dag.label} → 클리크 {len(cliques)}개, 분리집합 {[list(s) for s in separators]}"
    )
    return reduction


# === 이진화 ===

@dataclass(frozen=True, eq=False)
class BinarizedChain:
    """(a, 1{z_2=z*_2}, …, 1{z_m=z*_m}, y) 결합분포와 같은 길이의 선형 DAG"""

    joint: JointDistribution
    dag: CausalDag
    deviation: float
    z_star: Tuple[int, ...]
    repaired: bool
    outcome: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.joint.n,
            "table": self.joint.table.tolist(),
            "dag": self.dag.to_spec(),
            "deviation": self.deviation,
            "z_star": list(self.z_star),
            "repaired": self.repaired,
            "outcome": self.outcome.tolist(),
        }


def _indicator_joint(reduction: ChainReduction, z_star: Sequence[int]) -> np.ndarray:
    p = reduction.joint
    first, last = 1, p.n
    nodes = tuple(sorted({first, last}.union(*reduction.separators)))
    tensor = marginal_tensor(p, nodes)
    grid = np.indices(tensor.shape).reshape(len(nodes), -1)
    pos = {node: k for k, node in enumerate(nodes)}

    coords = [grid[pos[first]]]
    for separator, star in zip(reduction.separators, z_star):
        bits = decode(star, len(separator))
        match = np.ones(grid.shape[1], dtype=bool)
        for node, bit in zip(separator, bits):
            match &= grid[pos[node]] == bit
        coords.append(match.astype(int))
    coords.append(grid[pos[last]])

    out = np.zeros((2,) * len(coords))
    np.add.at(out, tuple(coords), tensor.reshape(-1))
    return flatten_tensor(out)


def binarize_chain(reduction: ChainReduction, z_star: Optional[Sequence[int]] = None) -> BinarizedChain:
    """분리집합 변수를 z*_k 지시 변수로 이진화하고 p′_{R′}(y|a) 편차를 측정"""
    p = reduction.joint
    z_star = tuple(reduction.z_star if z_star is None else z_star)
    if len(z_star) != len(reduction.separators):
        raise DomainError(f"z* 개수 불일치: {len(z_star)}개, 분리집합 {len(reduction.separators)}개")
    for separator, star in zip(reduction.separators, z_star):
        if not 0 <= star < 2 ** len(separator):
            raise DomainError(f"z*={star}가 분리집합 {list(separator)}의 값 범위 밖입니다")
        if marginal(p, separator)[star] <= 0:
            raise DomainError(f"확률 0인 z*={star} (분리집합 {list(separator)})")

    if reduction.kind == KIND_PROPER:
        table = _indicator_joint(reduction, z_star)
    else:
        table = marginal(p, (1, p.n))
    binary = JointDistribution(n=int(np.log2(table.size)), table=table)

    repaired = False
    if not binary.has_full_support:
        q = perturb_full_support(binary.conditional_family(), settings.binarize_floor_delta)
        binary = build_joint(binary.alpha, binary.mu, q)
        repaired = True
        logger.warning(f"이진화 결과에 0 확률 셀이 있어 완전지지 보정 적용: {reduction.dag.label}")

    linear = chain(*range(1, binary.n + 1))
    outcome = factorize(binary, linear).outcome_conditional
    deviation = float(np.max(np.abs(outcome - reduction.target)))
    return BinarizedChain(
        joint=binary,
        dag=linear,
        deviation=deviation,
        z_star=z_star,
        repaired=repaired,
        outcome=outcome,
    )


def binarize_exhaustive(reduction: ChainReduction) -> Tuple[List[BinarizedChain], BinarizedChain]:
    """모든 z* 조합에 대해 이진화하고 (전체 결과, 최소 편차 결과) 반환"""
    results = []
    choices = [range(2 ** len(s)) for s in reduction.separators]
    for combo in itertools.product(*choices):
        if any(marginal(reduction.joint, s)[c] <= 0 for s, c in zip(reduction.separators, combo)):
            continue
        results.append(binarize_chain(reduction, combo))
    best = min(results, key=lambda r: (r.deviation, r.z_star))
    return results, best
