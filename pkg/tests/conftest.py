"""
공용 테스트 픽스처
"""
import itertools
from typing import Callable, List

import numpy as np
import pytest

from app.services.dag import CausalDag, enumerate_dags, is_perfect
from app.services.probability import JointDistribution, build_joint, random_family


def random_joint(n: int, rng: np.random.Generator) -> JointDistribution:
    """P_{α,μ} 안의 무작위 완전지지 분포"""
    alpha, mu = rng.uniform(0.1, 0.9, size=2)
    return build_joint(float(alpha), float(mu), random_family(n, rng))


def random_perfect_dag(n: int, rng: np.random.Generator, size: int) -> CausalDag:
    """{1, n}과 중간 노드 size−2개 위의 무작위 완전 DAG

    무작위 위상 순서(1이 n보다 앞)에서 간선을 뽑은 뒤,
    공통 자식을 가진 부모끼리 연결해 완전성을 맞춘다.
    """
    middle = rng.choice(np.arange(2, n), size=size - 2, replace=False).tolist()
    order = [1, n] + [int(i) for i in middle]
    rng.shuffle(order)
    if order.index(n) < order.index(1):
        a, b = order.index(1), order.index(n)
        order[a], order[b] = order[b], order[a]
    rank = {node: k for k, node in enumerate(order)}

    def oriented(i: int, j: int):
        return (i, j) if rank[i] < rank[j] else (j, i)

    edges = {oriented(i, j) for i, j in itertools.combinations(order, 2) if rng.random() < 0.5}
    while True:
        dag = CausalDag(nodes=tuple(order), edges=tuple(edges))
        missing = {
            oriented(i, j)
            for node in dag.nodes
            for i, j in itertools.combinations(dag.parents(node), 2)
            if not dag.adjacent(i, j)
        }
        if not missing:
            break
        edges |= missing
    assert is_perfect(dag)
    return dag


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240501)


@pytest.fixture
def make_joint() -> Callable[[int, np.random.Generator], JointDistribution]:
    return random_joint


@pytest.fixture
def make_perfect_dag() -> Callable[[int, np.random.Generator, int], CausalDag]:
    return random_perfect_dag


@pytest.fixture(scope="session")
def perfect_dags_3() -> List[CausalDag]:
    return enumerate_dags(3, perfect_only=True)


@pytest.fixture(scope="session")
def perfect_dags_4() -> List[CausalDag]:
    return enumerate_dags(4, perfect_only=True)
