"""
단위 테스트: 최적 서사 탐색과 닫힌 형태 상한
"""
import numpy as np
import pytest

from app.core.exceptions import DomainError
from app.services.dag import COLLIDER, LEVER, CausalDag
from app.services.equilibrium import (
    collider_outcome,
    lever_bound,
    lever_codings,
    lever_optimal_patterns,
    lever_outcome,
    opportunity_bound,
    optimal_narrative_search,
)
from app.services.narrative import factorize
from app.services.probability import ConditionalFamily, build_joint

pytestmark = pytest.mark.unit

GRID = [round(0.1 * i, 1) for i in range(1, 10)]


class TestClosedFormOutcomes:
    """닫힌 형태 신념 테스트"""

    @pytest.mark.parametrize("dag, outcome", [(LEVER, lever_outcome), (COLLIDER, collider_outcome)])
    def test_matches_factorize(self, rng, dag, outcome):
        for _ in range(20):
            q = rng.uniform(0.02, 0.98, size=4)
            alpha, mu = rng.uniform(0.1, 0.9, size=2)
            belief = factorize(build_joint(alpha, mu, ConditionalFamily.binary(*q)), dag)
            values = outcome(q, alpha, mu)
            assert values[0] == pytest.approx(belief.p0, abs=1e-12)
            assert values[1] == pytest.approx(belief.p1, abs=1e-12)

    def test_vectorized_shape(self, rng):
        q = rng.uniform(0.02, 0.98, size=(7, 4))
        assert lever_outcome(q, 0.4, 0.5).shape == (7, 2)
        assert collider_outcome(q, 0.4, 0.5).shape == (7, 2)


class TestBounds:
    """상한 공식 테스트"""

    def test_values(self):
        assert lever_bound(0.5, 0.5) == pytest.approx(0.5 / 0.75)
        assert opportunity_bound(0.5, 0.5) == pytest.approx(0.75)
        assert lever_bound(0.2, 0.5, target=0) == pytest.approx(0.5 / (0.5 + 0.8 * 0.5))
        assert opportunity_bound(0.2, 0.5, target=0) == pytest.approx(1 - 0.8 * 0.5)

    def test_domain(self):
        with pytest.raises(DomainError):
            lever_bound(0.0, 0.5)
        with pytest.raises(DomainError):
            opportunity_bound(0.5, 0.5, target=2)

    def test_disjunction_formula_holds_below_diagonal(self):
        for alpha in GRID:
            for mu in GRID:
                for target in (0, 1):
                    w = alpha if target == 1 else 1 - alpha
                    codings = lever_codings(alpha, mu, target)
                    if w + mu < 1 - 1e-9:
                        assert lever_bound(alpha, mu, target) == pytest.approx(codings["disjunction"])
                    elif abs(w + mu - 1) <= 1e-9:
                        assert codings["conjunction"] == pytest.approx(codings["disjunction"])
                    else:
                        assert codings["conjunction"] > codings["disjunction"]
                        assert lever_bound(alpha, mu, target) == pytest.approx(codings["conjunction"])

    def test_codings_tie_on_diagonal(self):
        codings = lever_codings(0.5, 0.5)
        assert codings["disjunction"] == pytest.approx(2 / 3)
        assert codings["conjunction"] == pytest.approx(2 / 3)
        assert len(lever_optimal_patterns(0.5, 0.5, target=1)) == 4
        assert len(lever_optimal_patterns(0.5, 0.5, target=0)) == 4

    def test_optimal_patterns_follow_region(self):
        assert lever_optimal_patterns(0.3, 0.5, target=1) == [(0.0, 1.0, 1.0, 1.0), (1.0, 0.0, 0.0, 0.0)]
        assert lever_optimal_patterns(0.6, 0.5, target=1) == [(0.0, 0.0, 0.0, 1.0), (1.0, 1.0, 1.0, 0.0)]
        assert lever_optimal_patterns(0.6, 0.5, target=0) == [(1.0, 1.0, 0.0, 1.0), (0.0, 0.0, 1.0, 0.0)]
        assert lever_optimal_patterns(0.3, 0.5, target=0) == [(0.0, 1.0, 0.0, 0.0), (1.0, 0.0, 1.0, 1.0)]

    def test_opportunity_dominates_lever_when_mu_small(self):
        for alpha in GRID:
            for mu in GRID:
                for target in (0, 1):
                    w = alpha if target == 1 else 1 - alpha
                    dominates = opportunity_bound(alpha, mu, target) > lever_bound(alpha, mu, target)
                    assert dominates == (mu * (1 + w) < 1)

    def test_lever_beats_opportunity_at_high_mu(self):
        assert lever_bound(0.9, 0.9) == pytest.approx(0.9 + 0.09 * 0.1 / 0.19)
        assert lever_bound(0.9, 0.9) > opportunity_bound(0.9, 0.9)


# 닫힌 형태 disjunction 공식을 넘는 결정적 q (α, μ, 목표, q, 기대값)
DISJUNCTION_EXCEEDED = [
    (0.9, 0.2, 1, (1.0, 1.0, 1.0, 0.0), 0.2 + 0.2 * 0.8 * 0.1 / (1 - 0.18)),
    (0.9, 0.2, 1, (0.0, 0.0, 0.0, 1.0), 0.2 + 0.2 * 0.8 * 0.1 / (1 - 0.18)),
    (0.6, 0.5, 1, (0.0, 0.0, 0.0, 1.0), 0.5 + 0.25 * 0.4 / 0.7),
    (0.1, 0.7, 0, (0.0, 1.0, 0.0, 0.0), 0.7 + 0.21 * 0.1 / (1 - 0.63)),
]


class TestDisjunctionCounterexamples:
    """w + μ > 1 에서 conjunction 부호화가 disjunction 공식을 넘는 사례"""

    @pytest.mark.parametrize("alpha, mu, target, pattern, expected", DISJUNCTION_EXCEEDED)
    def test_conjunction_exceeds_disjunction(self, alpha, mu, target, pattern, expected):
        q = np.asarray(pattern) * (1 - 2e-8) + 1e-8
        value = lever_outcome(q, alpha, mu)[target]
        codings = lever_codings(alpha, mu, target)
        assert value == pytest.approx(expected, abs=1e-6)
        assert value > codings["disjunction"] + 1e-4
        assert value <= lever_bound(alpha, mu, target) + 1e-6

    def test_reported_gap_against_disjunction(self):
        result = optimal_narrative_search(LEVER, 0.9, 0.2, target=1)
        data = result.to_dict()
        assert data["codings"]["disjunction"] == pytest.approx(0.2 / (0.2 + 0.9 * 0.8))
        assert data["value"] == pytest.approx(0.219512, abs=1e-5)
        assert data["value"] > data["codings"]["disjunction"]
        assert data["gap"] == pytest.approx(0.0, abs=1e-5)
        corner = tuple(round(v) for v in result.q.x2_probabilities())
        assert corner in {(0, 0, 0, 1), (1, 1, 1, 0)}


class TestOptimalNarrativeSearch:
    """꼭짓점/격자 탐색 테스트"""

    @pytest.mark.parametrize("dag, bound", [(LEVER, lever_bound), (COLLIDER, opportunity_bound)])
    @pytest.mark.parametrize("target", [0, 1])
    def test_corner_maximum_attains_bound(self, dag, bound, target):
        for alpha in GRID:
            for mu in GRID:
                result = optimal_narrative_search(dag, alpha, mu, target=target)
                assert result.value == pytest.approx(bound(alpha, mu, target), abs=1e-4)
                assert result.value <= result.bound + 1e-9
                assert result.evaluated == 16

    def test_grid_refinement(self):
        result = optimal_narrative_search(COLLIDER, 0.3, 0.6, target=1, grid=0.25)
        assert result.evaluated > 16 + 5 ** 4
        assert result.gap >= -1e-9
        assert result.gap <= 1e-4
        data = result.to_dict()
        assert data["role"] == "opportunity"
        assert set(data["q"]) == {"p00", "p01", "p10", "p11"}
        assert result.q.label == "search:opportunity:a=1"

    def test_best_family_reproduces_value(self):
        result = optimal_narrative_search(LEVER, 0.4, 0.3, target=0)
        belief = factorize(build_joint(0.4, 0.3, result.q), LEVER)
        assert belief.p0 == pytest.approx(result.value, abs=1e-12)

    def test_unsupported_dag(self):
        with pytest.raises(DomainError):
            optimal_narrative_search(CausalDag(nodes=(1, 2, 3), edges=((1, 2), (1, 3), (2, 3))), 0.5, 0.5)

    def test_bad_arguments(self):
        with pytest.raises(DomainError):
            optimal_narrative_search(LEVER, 0.5, 0.5, delta=0.2)
        with pytest.raises(DomainError):
            optimal_narrative_search(LEVER, 0.5, 0.5, grid=0.6)
        with pytest.raises(DomainError):
            optimal_narrative_search(LEVER, 0.5, 0.5, target=3)

    def test_values_are_probabilities(self):
        corners = np.array([[0.0, 1.0, 1.0, 1.0], [1.0, 1.0, 0.0, 1.0]]) * (1 - 2e-6) + 1e-6
        values = collider_outcome(corners, 0.5, 0.5)
        assert np.all((values > 0) & (values < 1))
