"""
통합 테스트: 내장 시나리오의 닫힌 형태 결과 재현
"""
import math

import numpy as np
import pytest

from app.services.equilibrium import consistency_check, side_value_profile, solve
from app.services.scenarios import (
    build_problem,
    load_scenario,
    parse_scenario,
    run_solve,
    run_sweep,
    run_verify,
    write_sweep,
)

pytestmark = pytest.mark.integration


def _failed(report):
    return [c.model_dump() for c in report.comparisons or [] if not c.passed]


class TestVerifyBuiltins:
    """내장 시나리오 검증"""

    @pytest.mark.parametrize("name", ["claim1", "claim2", "short-narratives", "opportunity"])
    def test_builtin_passes(self, name):
        report = run_verify(name)
        assert report.command == "verify"
        assert report.passed, _failed(report)

    def test_hawk_dove_values(self):
        report = run_verify("claim1")
        result = report.result
        assert result["alpha"] == pytest.approx(2 - math.sqrt(2), abs=1e-3)
        weights = result["policy_weights"]
        assert weights[0]["d"] == pytest.approx(0.676777, abs=1e-3)
        assert weights[1]["d"] == pytest.approx(0.323223, abs=1e-3)
        assert weights[0]["weight"] == pytest.approx(0.742641, abs=1e-3)
        assert report.checks["consistency"]["consistency_residual"] < 1e-8
        assert report.checks["polarization"]["polarized"]

    def test_lever_against_rational_expectations(self):
        result = run_verify("claim2").result
        assert result["alpha"] == pytest.approx(0.420844, abs=1e-3)
        (lever,) = [w for w in result["policy_weights"] if w["d"] < 0.5 - 1e-6]
        assert lever["d"] == pytest.approx(0.341688, abs=1e-3)
        assert lever["weight"] == pytest.approx(0.5, abs=1e-3)

    def test_short_narratives_beliefs(self):
        result = run_verify("short-narratives").result
        assert result["alpha"] == pytest.approx(0.5, abs=1e-6)
        hawk = next(e for e in result["support"] if e["side"] == "hawk")
        assert hawk["belief"]["p_y1_given_a1"] == pytest.approx(2 / 3, abs=1e-4)
        assert hawk["belief"]["p_y1_given_a0"] == pytest.approx(1 / 3, abs=1e-4)

    def test_short_narratives_shifted_ideal(self):
        report = run_verify("short-narratives", d_star=0.6)
        assert report.result["alpha"] == pytest.approx(0.6, abs=1e-4)
        assert report.passed, _failed(report)
        hawks = [e for e in report.result["support"] if e["side"] == "hawk"]
        doves = [e for e in report.result["support"] if e["side"] == "dove"]
        assert {e["family"] for e in hawks} <= {"corner:0-0-0-1", "corner:1-1-1-0"}
        assert {e["family"] for e in doves} <= {"corner:1-1-0-1", "corner:0-0-1-0"}
        assert hawks[0]["belief"]["p_y1_given_a1"] == pytest.approx(0.5 + 0.25 * 0.4 / 0.7, abs=1e-4)
        assert doves[0]["belief"]["p_y1_given_a0"] == pytest.approx(0.5 / 0.7, abs=1e-4)

    def test_opportunity_extremes(self):
        report = run_verify("opportunity")
        weights = report.result["policy_weights"]
        assert weights[0]["d"] >= 1 - 1e-3 - 1e-6
        assert weights[-1]["d"] <= 1e-3 + 1e-6
        assert {e["role"] for e in report.result["support"]} == {"opportunity"}


class TestSweep:
    """비용 계수 스윕"""

    def test_cost_sweep_matches_closed_form(self, tmp_path):
        frame = run_sweep(load_scenario("claim1"), "k", "0.5:2.0:0.1", workers=2)
        assert len(frame) == 16
        assert list(frame["k"]) == sorted(frame["k"])
        for _, row in frame.iterrows():
            offset = math.sqrt(2) / (8 * row["k"])
            assert row["alpha"] == pytest.approx(2 - math.sqrt(2), abs=1e-3)
            assert row["d_r"] == pytest.approx(0.5 + offset, abs=1e-3)
            assert row["d_l"] == pytest.approx(0.5 - offset, abs=1e-3)

        path = tmp_path / "sweep.csv"
        write_sweep(frame, path)
        header = path.read_text(encoding="utf-8").splitlines()[0]
        assert header.startswith("k,alpha,kind,d_r,d_l")


class TestPolarization:
    """풍부한 완전 DAG 시나리오의 양극화"""

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(20))
    def test_rich_perfect_scenarios_polarize(self, seed):
        config = parse_scenario({
            "name": f"rich-{seed}",
            "n": 3,
            "mu": 0.5,
            "d_star": 0.5,
            "q_set": ["random:2", "mirror-closure"],
            "dag_set": {"perfect_only": True, "action_ancestral": True},
            "solver": {"scan_points": 256},
            "seed": seed,
        })
        report = run_solve(config)
        assert report.checks["richness"]["rich"]
        policies = report.checks["polarization"]["policies"]
        assert len(policies) == 2
        d_r, d_l = policies
        assert d_l < 0.5 < d_r
        assert report.checks["consistency"]["passed"]

    def test_side_values_are_monotone(self):
        problem = build_problem(load_scenario("short-narratives"))
        lo, hi = problem.domain
        table = side_value_profile(problem, np.linspace(lo, hi, 64))
        assert np.all(np.diff(table["u_right"]) < 0)
        assert np.all(np.diff(table["u_left"]) > 0)
        assert table["u_right"].iloc[0] > table["u_right"].iloc[-1]
        assert table["u_left"].iloc[-1] > table["u_left"].iloc[0]

    def test_hawk_dove_consistency(self):
        problem = build_problem(load_scenario("claim1"))
        report = consistency_check(solve(problem), problem)
        assert report.consistency_residual < 1e-8
        assert report.weight_residual < 1e-8
        assert report.passed
