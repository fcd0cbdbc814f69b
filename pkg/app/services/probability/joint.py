"""
이진 변수 결합분포 엔진
P_{α,μ} 분포 생성, 주변화, 조건화, 완전지지 섭동
"""
import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.core.exceptions import DomainError, ValidationError

logger = logging.getLogger(__name__)

MAX_VARIABLES = 12
NORMALIZATION_TOL = 1e-12


# === Assignment 인덱싱 ===

def encode(bits: Sequence[int]) -> int:
    """(x_1,…,x_n) → 정수 인덱스 (x_1이 최하위 비트)"""
    index = 0
    for i, bit in enumerate(bits):
        if bit not in (0, 1):
            raise DomainError(f"이진 값이 아님: x_{i + 1}={bit}")
        index |= int(bit) << i
    return index


def decode(index: int, n: int) -> Tuple[int, ...]:
    if not 0 <= index < 2 ** n:
        raise DomainError(f"인덱스 범위 초과: {index} (n={n})")
    return tuple((index >> i) & 1 for i in range(n))


def flatten_tensor(tensor: np.ndarray) -> np.ndarray:
    """축 순서 (x_1,…,x_k) 텐서를 첫 변수가 최하위인 평면 배열로 변환"""
    return np.ascontiguousarray(tensor.transpose(tuple(reversed(range(tensor.ndim))))).reshape(-1)


def tensor_view(table: np.ndarray, n: int) -> np.ndarray:
    """평면 배열을 축 i-1 ↔ x_i 텐서로 변환 (flatten_tensor의 역)"""
    return table.reshape((2,) * n).transpose(tuple(reversed(range(n))))


def _check_n(n: int, minimum: int = 2) -> None:
    if not minimum <= n <= MAX_VARIABLES:
        raise DomainError(f"변수 개수 범위 초과: n={n} (허용 {minimum}..{MAX_VARIABLES})")


def _check_open_unit(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name}는 (0,1) 안에 있어야 합니다: {value}")


# === 조건부 분포족 q(x_2..x_{n-1} | a, y) ===

@dataclass(frozen=True, eq=False)
class ConditionalFamily:
    """중간 변수 조건부 분포족

    tables[a][y]는 길이 2^(n-2) 확률 벡터 (x_2가 최하위 비트).
    delta_order는 (a,y) 행별 섭동 차수: 행은 가중치 δ^order로 균등분포와 섞인다.
    차수가 큰 행일수록 δ→0에서 정확한 명세에 더 빨리 수렴한다.
    """

    n: int
    tables: np.ndarray
    label: Optional[str] = field(default=None)
    delta_order: Optional[Tuple[float, float, float, float]] = field(default=None)

    def __post_init__(self):
        _check_n(self.n)
        tables = np.array(self.tables, dtype=float)
        width = 2 ** (self.n - 2)
        if tables.shape != (2, 2, width):
            raise ValidationError(
                f"조건부 분포족 모양 오류: {tables.shape}, 기대값 (2, 2, {width})"
            )
        if not np.all(np.isfinite(tables)) or np.any(tables < 0):
            raise ValidationError("조건부 분포족에 음수 또는 비유한 값이 있습니다")
        sums = tables.sum(axis=2)
        if np.max(np.abs(sums - 1.0)) > NORMALIZATION_TOL:
            raise ValidationError(f"조건부 분포족 행 합이 1이 아닙니다: {sums.tolist()}")
        tables.setflags(write=False)
        object.__setattr__(self, "tables", tables)
        if self.delta_order is not None:
            order = tuple(float(v) for v in self.delta_order)
            if len(order) != 4 or not all(np.isfinite(v) and v > 0 for v in order):
                raise ValidationError(f"delta_order는 양수 4개여야 합니다: {list(self.delta_order)}")
            object.__setattr__(self, "delta_order", order)

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[Sequence[float]],
        n: int,
        label: Optional[str] = None,
        delta_order: Optional[Sequence[float]] = None,
    ) -> "ConditionalFamily":
        """(a,y) = (0,0),(0,1),(1,0),(1,1) 순서의 네 행으로 생성"""
        if len(rows) != 4:
            raise ValidationError(f"조건부 분포족은 4개 행이 필요합니다: {len(rows)}개")
        return cls(
            n=n,
            tables=np.array(rows, dtype=float).reshape(2, 2, -1),
            label=label,
            delta_order=None if delta_order is None else tuple(delta_order),
        )

    @classmethod
    def binary(
        cls,
        p00: float,
        p01: float,
        p10: float,
        p11: float,
        label: Optional[str] = None,
        delta_order: Optional[Sequence[float]] = None,
    ) -> "ConditionalFamily":
        """n=3 축약형: p_ay = p(x_2=1 | a, y)"""
        probs = np.array([[p00, p01], [p10, p11]], dtype=float)
        if np.any(probs < 0) or np.any(probs > 1):
            raise ValidationError(f"p(x_2=1|a,y)가 [0,1] 밖에 있습니다: {probs.tolist()}")
        return cls(
            n=3,
            tables=np.stack([1.0 - probs, probs], axis=2),
            label=label,
            delta_order=None if delta_order is None else tuple(delta_order),
        )

    @property
    def width(self) -> int:
        return self.tables.shape[2]

    def rows(self) -> List[List[float]]:
        return [self.tables[a, y].tolist() for a in (0, 1) for y in (0, 1)]

    def x2_probabilities(self) -> Tuple[float, float, float, float]:
        """n=3 전용: (p00, p01, p10, p11)"""
        if self.n != 3:
            raise DomainError("x2_probabilities는 n=3에서만 정의됩니다")
        p = self.tables[:, :, 1]
        return float(p[0, 0]), float(p[0, 1]), float(p[1, 0]), float(p[1, 1])

    def key(self, digits: int = 12) -> Tuple[float, ...]:
        key = tuple(np.round(self.tables, digits).ravel().tolist())
        return key if self.delta_order is None else key + self.delta_order

    def with_label(self, label: Optional[str]) -> "ConditionalFamily":
        return ConditionalFamily(n=self.n, tables=self.tables, label=label, delta_order=self.delta_order)

    def __repr__(self) -> str:
        return f"ConditionalFamily(n={self.n}, label={self.label!r})"


# === 결합분포 ===

@dataclass(frozen=True, eq=False)
class JointDistribution:
    """n개 이진 변수의 전체 확률표 (x_1 = 행동 a, x_n = 결과 y)"""

    n: int
    table: np.ndarray

    def __post_init__(self):
        _check_n(self.n)
        table = np.array(self.table, dtype=float).reshape(-1)
        if table.shape != (2 ** self.n,):
            raise ValidationError(f"확률표 길이 오류: {table.shape[0]}, 기대값 {2 ** self.n}")
        if not np.all(np.isfinite(table)) or np.any(table < 0):
            raise ValidationError("확률표에 음수 또는 비유한 값이 있습니다")
        total = table.sum()
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValidationError(f"확률표 합이 1이 아닙니다: {total!r}")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @cached_property
    def tensor(self) -> np.ndarray:
        return tensor_view(self.table, self.n)

    @cached_property
    def alpha(self) -> float:
        return float(self.tensor[1].sum())

    @cached_property
    def mu(self) -> float:
        return float(self.tensor[..., 1].sum())

    @property
    def min_entry(self) -> float:
        return float(self.table.min())

    @property
    def has_full_support(self) -> bool:
        return self.min_entry > 0.0

    def outcome_given_action(self) -> np.ndarray:
        """객관적 p(y=1 | a) 두 값"""
        ay = self.tensor.sum(axis=tuple(range(1, self.n - 1)))
        return ay[:, 1] / ay.sum(axis=1)

    def family_violation(self) -> float:
        """P_{α,μ} 제약 위반 정도: max_a |p(y=1|a) − μ|"""
        return float(np.max(np.abs(self.outcome_given_action() - self.mu)))

    def conditional_family(self) -> ConditionalFamily:
        """q(x_2..x_{n-1} | a, y) 복원 (build_joint의 역)"""
        axes = (0, self.n - 1) + tuple(range(1, self.n - 1))
        t = self.tensor.transpose(axes)
        ay = t.reshape(2, 2, -1).sum(axis=2, keepdims=True)
        if np.any(ay <= 0):
            raise DomainError("확률 0인 (a, y) 셀이 있어 q를 복원할 수 없습니다")
        middle = np.array([
            [flatten_tensor(np.asarray(t[a, y])) for y in (0, 1)] for a in (0, 1)
        ])
        return ConditionalFamily(n=self.n, tables=middle / ay)

    def to_spec(self) -> dict:
        return {"n": self.n, "table": self.table.tolist()}


def build_joint(alpha: float, mu: float, q: ConditionalFamily) -> JointDistribution:
    """p(x) = p(a)·p(y|a)·q(x_2..x_{n-1}|a,y), p(a=1)=α, p(y=1|a)=μ"""
    _check_open_unit("alpha", alpha)
    _check_open_unit("mu", mu)
    if not isinstance(q, ConditionalFamily):
        raise ValidationError(f"ConditionalFamily가 아닙니다: {type(q).__name__}")
    pa = np.array([1.0 - alpha, alpha])
    py = np.array([1.0 - mu, mu])
    # 평면 인덱스 = a + 2·m + 2^(n-1)·y
    table = np.einsum("a,y,aym->yma", pa, py, q.tables).reshape(-1)
    return JointDistribution(n=q.n, table=table / table.sum())


def joint_tensor_batch(alphas: np.ndarray, mu: float, q: ConditionalFamily) -> np.ndarray:
    """여러 α에 대한 build_joint 텐서 묶음, 모양 (B,) + (2,)*n, 축 i ↔ x_i"""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    if np.any(alphas <= 0) or np.any(alphas >= 1):
        raise DomainError("alpha는 (0,1) 안에 있어야 합니다")
    _check_open_unit("mu", mu)
    n = q.n
    pa = np.stack([1.0 - alphas, alphas], axis=1)
    py = np.array([1.0 - mu, mu])
    batch = np.einsum("ba,y,aym->baym", pa, py, q.tables)
    batch = batch.reshape((len(alphas), 2, 2) + (2,) * (n - 2))
    # 축: b, a, y, x_{n-1}, …, x_2 → b, a, x_2, …, x_{n-1}, y
    order = (0, 1) + tuple(3 + (n - 1 - j) for j in range(2, n)) + (2,)
    return batch.transpose(order)


def _check_subset(n: int, subset: Iterable[int], name: str, allow_empty: bool = False) -> Tuple[int, ...]:
    nodes = tuple(sorted(set(int(i) for i in subset)))
    if not nodes and not allow_empty:
        raise DomainError(f"{name} 집합이 비어 있습니다")
    bad = [i for i in nodes if not 1 <= i <= n]
    if bad:
        raise DomainError(f"{name} 집합에 범위 밖 변수가 있습니다: {bad} (n={n})")
    return nodes


def marginal_tensor(p: JointDistribution, subset: Iterable[int]) -> np.ndarray:
    """주변분포 텐서 (정렬된 subset 순서의 축)"""
    nodes = _check_subset(p.n, subset, "marginal", allow_empty=True)
    drop = tuple(i - 1 for i in range(1, p.n + 1) if i not in nodes)
    return p.tensor.sum(axis=drop)


def marginal(p: JointDistribution, subset: Iterable[int]) -> np.ndarray:
    """subset 위 주변분포 (정렬된 subset에서 첫 변수가 최하위 비트)"""
    nodes = _check_subset(p.n, subset, "marginal")
    return flatten_tensor(marginal_tensor(p, nodes))


def conditional(p: JointDistribution, targets: Iterable[int], givens: Iterable[int]) -> np.ndarray:
    """조건부 확률표 p(targets | givens)

    Returns:
        (2^|givens|, 2^|targets|) 배열. 행은 givens 할당, 열은 targets 할당
        (각각 정렬 순서에서 첫 변수가 최하위 비트). 각 행의 합은 1.
    """
    t_nodes = _check_subset(p.n, targets, "targets")
    g_nodes = _check_subset(p.n, givens, "givens", allow_empty=True)
    overlap = set(t_nodes) & set(g_nodes)
    if overlap:
        raise DomainError(f"targets와 givens가 겹칩니다: {sorted(overlap)}")

    union = tuple(sorted(t_nodes + g_nodes))
    joint = marginal_tensor(p, union)
    pos = {node: k for k, node in enumerate(union)}
    order = [pos[g] for g in reversed(g_nodes)] + [pos[t] for t in reversed(t_nodes)]
    block = joint.transpose(order).reshape(2 ** len(g_nodes), 2 ** len(t_nodes))
    row_sums = block.sum(axis=1, keepdims=True)
    if np.any(row_sums <= 0):
        raise DomainError("확률 0인 조건 사건이 있습니다 (완전지지 분포가 필요)")
    return block / row_sums


def perturb_full_support(q: ConditionalFamily, delta: float) -> ConditionalFamily:
    """각 (a,y) 행을 균등분포와 가중치 δ로 혼합

    q.delta_order가 있으면 행 (a,y)의 가중치는 δ^order[a,y].
    결과 분포족은 이미 섭동되었으므로 차수를 갖지 않는다.
    """
    if not 0.0 < delta < 0.1:
        raise DomainError(f"delta는 (0, 0.1) 안에 있어야 합니다: {delta}")
    if q.delta_order is None:
        weights = np.full((2, 2, 1), delta)
    else:
        weights = delta ** np.asarray(q.delta_order).reshape(2, 2, 1)
    mixed = (1.0 - weights) * q.tables + weights / q.width
    return ConditionalFamily(n=q.n, tables=mixed, label=q.label)


def mirror(q: ConditionalFamily) -> ConditionalFamily:
    """a 인자를 뒤집은 거울상 q'(·|a,y) = q(·|1−a,y)"""
    label = None
    if q.label:
        label = q.label[len("mirror:"):] if q.label.startswith("mirror:") else f"mirror:{q.label}"
    order = None if q.delta_order is None else q.delta_order[2:] + q.delta_order[:2]
    return ConditionalFamily(n=q.n, tables=q.tables[::-1], label=label, delta_order=order)


# === 분포족 생성기 ===

def corner_families(n: int) -> List[ConditionalFamily]:
    """모든 결정적 분포족 (각 행이 중간 할당 하나에 점질량)"""
    _check_n(n, minimum=3)
    width = 2 ** (n - 2)
    if width ** 4 > 65536:
        raise DomainError(f"corner 분포족이 너무 많습니다: n={n}")
    eye = np.eye(width)
    families = []
    for choice in itertools.product(range(width), repeat=4):
        tables = np.stack([eye[c] for c in choice]).reshape(2, 2, width)
        label = "corner:" + "-".join(str(c) for c in choice)
        families.append(ConditionalFamily(n=n, tables=tables, label=label))
    return families


def grid_families(h: float) -> List[ConditionalFamily]:
    """n=3 전용: p(x_2=1|a,y)가 {0, h, …, 1} 격자 위에 있는 모든 분포족"""
    if not 0.0 < h <= 1.0:
        raise DomainError(f"격자 간격은 (0,1] 안에 있어야 합니다: {h}")
    steps = int(round(1.0 / h))
    if abs(steps * h - 1.0) > 1e-9:
        raise DomainError(f"격자 간격 1/h가 정수가 아닙니다: h={h}")
    values = np.linspace(0.0, 1.0, steps + 1)
    return [
        ConditionalFamily.binary(*combo, label="grid:" + ",".join(f"{v:g}" for v in combo))
        for combo in itertools.product(values, repeat=4)
    ]


def random_family(n: int, rng: np.random.Generator, label: Optional[str] = None) -> ConditionalFamily:
    """Dirichlet(1) 행으로 무작위 분포족 생성"""
    _check_n(n, minimum=2)
    width = 2 ** (n - 2)
    tables = rng.dirichlet(np.ones(width), size=(2, 2))
    return ConditionalFamily(n=n, tables=tables / tables.sum(axis=2, keepdims=True), label=label)


def mirror_closure(families: Sequence[ConditionalFamily]) -> List[ConditionalFamily]:
    """빠진 거울상을 추가하고 중복 제거 (입력 순서 유지)"""
    seen = set()
    closed: List[ConditionalFamily] = []
    for q in list(families) + [mirror(f) for f in families]:
        k = q.key()
        if k in seen:
            continue
        seen.add(k)
        closed.append(q)
    added = len(closed) - len({f.key() for f in families})
    if added:
        logger.debug(f"거울상 {added}개 추가")
    return closed
