"""
단위 테스트: 시나리오 설정, 생성기 전개, 리포트 출력
"""
import json

import numpy as np
import pytest

from app.core.exceptions import ConfigError
from app.services.scenarios import (
    ResultReport,
    ScenarioConfig,
    build_problem,
    emit_scenario,
    expand_dags,
    expand_families,
    list_builtins,
    load_scenario,
    parse_distribution,
    parse_range,
    parse_scenario,
    parse_scenario_text,
    read_json,
    render_report,
    run_linearize,
    run_search,
    run_sweep,
    run_verify,
    with_overrides,
    write_report,
)

pytestmark = pytest.mark.unit


def _config(**changes) -> ScenarioConfig:
    data = {"n": 3, "mu": 0.5, "d_star": 0.5, "q_set": ["corners"]}
    data.update(changes)
    return parse_scenario(data)


class TestLoadScenario:
    """시나리오 로드 테스트"""

    def test_builtins(self):
        assert list_builtins() == ["claim1", "claim2", "opportunity", "short-narratives"]
        config = load_scenario("claim1")
        assert config.n == 3
        assert config.cost.k == 1.0
        assert config.citation

    def test_unknown_builtin_lists_alternatives(self):
        with pytest.raises(ConfigError) as exc:
            load_scenario("claim9")
        assert "claim1" in str(exc.value)
        assert "short-narratives" in str(exc.value)

    def test_json_syntax_error_location(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"n": 3,\n"mu": ]}', encoding="utf-8")
        with pytest.raises(ConfigError) as exc:
            load_scenario(path)
        assert exc.value.line == 2
        assert exc.value.column == 7
        assert "line 2, column 7" in str(exc.value)

    def test_field_path_in_validation_error(self):
        with pytest.raises(ConfigError) as exc:
            _config(cost={"k": -1.0})
        assert exc.value.field == "cost.k"

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError) as exc:
            _config(gamma=1.0)
        assert exc.value.field == "gamma"

    def test_unknown_generator(self):
        with pytest.raises(ConfigError) as exc:
            _config(q_set=["bogus"])
        assert exc.value.field.startswith("q_set")

    def test_row_width_checked(self):
        with pytest.raises(ConfigError):
            _config(q_set=[{"rows": [[1, 0, 0, 0]] * 4}])

    def test_row_orders_need_four_positive_values(self):
        rows = [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]
        with pytest.raises(ConfigError):
            _config(q_set=[{"rows": rows, "delta_order": [1.0, 2.0]}])
        with pytest.raises(ConfigError):
            _config(q_set=[{"rows": rows, "delta_order": [1.0, 0.0, 1.0, 2.0]}])

    def test_top_level_must_be_object(self):
        with pytest.raises(ConfigError):
            parse_scenario_text("[1, 2]")

    def test_emit_then_load(self):
        config = load_scenario("claim2")
        assert parse_scenario_text(emit_scenario(config)) == config


class TestOverrides:
    """매개변수 덮어쓰기 테스트"""

    def test_cost_parameters(self):
        config = with_overrides(load_scenario("claim1"), k=2.0, eps=0.01, d_star=None)
        assert config.cost.k == 2.0
        assert config.epsilon == 0.01
        assert config.d_star == 0.5

    def test_unknown_parameter(self):
        with pytest.raises(ConfigError) as exc:
            with_overrides(_config(), zeta=1.0)
        assert exc.value.field == "zeta"

    def test_invalid_value(self):
        with pytest.raises(ConfigError):
            with_overrides(_config(), mu=1.5)


class TestGenerators:
    """분포족·DAG 생성기 전개 테스트"""

    def test_corners_and_grid(self):
        assert len(expand_families(_config())) == 16
        assert len(expand_families(_config(q_set=["grid:0.5"]))) == 81

    def test_grid_requires_three_nodes(self):
        with pytest.raises(ConfigError) as exc:
            expand_families(_config(n=4, q_set=["grid:0.5"]))
        assert exc.value.field == "q_set[0]"

    def test_random_is_seeded(self):
        first = expand_families(_config(n=4, q_set=["random:3"], seed=7))
        second = expand_families(_config(n=4, q_set=["random:3"], seed=7))
        other = expand_families(_config(n=4, q_set=["random:3"], seed=8))
        assert len(first) == 3
        assert all(np.array_equal(a.tables, b.tables) for a, b in zip(first, second))
        assert not np.array_equal(first[0].tables, other[0].tables)

    def test_random_count(self):
        with pytest.raises(ConfigError):
            expand_families(_config(q_set=["random:0"]))

    def test_mirror_closure(self):
        rows = [[0.2, 0.8], [0.7, 0.3], [0.1, 0.9], [0.5, 0.5]]
        families = expand_families(_config(q_set=[{"label": "s", "rows": rows}, "mirror-closure"]))
        assert [q.label for q in families] == ["s", "mirror:s"]

    def test_row_orders_reach_families(self):
        (family,) = expand_families(load_scenario("claim1"))
        assert family.label == "x2=a(1-y)"
        assert family.delta_order == (1.0, 2.0, 1.0, 2.0)
        assert family.x2_probabilities() == (0.0, 0.0, 1.0, 0.0)

    def test_dag_enumeration(self):
        assert len(expand_dags(load_scenario("claim1"))) == 14
        assert len(expand_dags(load_scenario("claim2"))) == 13
        assert len(expand_dags(load_scenario("short-narratives"))) == 12
        assert len(expand_dags(load_scenario("opportunity"))) == 18

    def test_explicit_dags(self):
        config = _config(dag_set=[{"nodes": [1, 2, 3], "edges": [[1, 2], [2, 3]]}])
        assert [d.label for d in expand_dags(config)] == ["{1,2,3}:1>2,2>3"]

    def test_bad_dag(self):
        with pytest.raises(ConfigError) as exc:
            expand_dags(_config(dag_set=[{"nodes": [1, 3], "edges": [[1, 2]]}]))
        assert exc.value.field == "dag_set"

    def test_build_problem(self):
        problem = build_problem(load_scenario("claim1"))
        assert len(problem.narratives) == 14
        assert problem.epsilon == 1e-4
        assert problem.options.scan_points == load_scenario("claim1").solver.scan_points


class TestRunnerHelpers:
    """실행기 보조 함수 테스트"""

    def test_parse_range(self):
        values = parse_range("0.5:2.0:0.1")
        assert len(values) == 16
        assert values[0] == 0.5
        assert values[-1] == 2.0
        assert values[3] == 0.8

    @pytest.mark.parametrize("text", ["1:0:0.1", "0:1:0", "abc", "0:1"])
    def test_parse_range_errors(self, text):
        with pytest.raises(ConfigError):
            parse_range(text)

    def test_sweep_parameter_checked(self):
        with pytest.raises(ConfigError):
            run_sweep(_config(), "n", [3])

    def test_verify_requires_oracle(self):
        with pytest.raises(ConfigError):
            run_verify("unknown")

    def test_parse_distribution(self):
        p = parse_distribution({"n": 2, "table": [0.1, 0.2, 0.3, 0.4]})
        assert p.n == 2
        q = parse_distribution({"alpha": 0.4, "mu": 0.3, "rows": [[0.5, 0.5]] * 4})
        assert q.n == 3
        assert q.alpha == pytest.approx(0.4)
        with pytest.raises(ConfigError):
            parse_distribution({"alpha": 0.4})

    def test_read_json(self, tmp_path):
        with pytest.raises(ConfigError):
            read_json(tmp_path / "missing.json", "dag")
        path = tmp_path / "list.json"
        path.write_text("[]", encoding="utf-8")
        with pytest.raises(ConfigError):
            read_json(path, "dag")
        path.write_text('{"nodes": [1, 3]}', encoding="utf-8")
        assert read_json(path, "dag") == {"nodes": [1, 3]}


class TestReports:
    """결과 리포트 테스트"""

    def test_search_report(self):
        report = run_search("collider", 0.5, 0.5)
        assert report.command == "search-narrative"
        assert report.checks["within_bound"]
        assert report.result["value"] == pytest.approx(0.75, abs=1e-4)
        with pytest.raises(ConfigError):
            run_search("fork", 0.5, 0.5)

    def test_lever_search_report_shows_codings(self):
        report = run_search("lever", 0.9, 0.2)
        codings = report.result["codings"]
        assert codings["conjunction"] > codings["disjunction"]
        assert report.result["bound"] == pytest.approx(codings["conjunction"])
        assert report.checks["within_bound"]
        assert abs(report.checks["gap"]) <= 1e-5
        assert run_search("collider", 0.5, 0.5).result["codings"] is None

    def test_linearize_report(self):
        report = run_linearize(
            {"nodes": [1, 2, 3], "edges": [[1, 2], [2, 3]]},
            {"alpha": 0.4, "mu": 0.3, "rows": [[0.9, 0.1], [0.2, 0.8], [0.6, 0.4], [0.3, 0.7]]},
        )
        assert report.checks["chain_exact"] <= 1e-12
        assert report.checks["clique_factor_agreement"] <= 1e-12
        assert report.checks["singleton_separators"]
        assert report.checks["exhaustive_candidates"] == 2
        assert report.result["binarized"]["deviation"] <= 1e-12

    def test_render_is_deterministic(self):
        report = run_search("lever", 0.3, 0.6)
        assert render_report(report) == render_report(report)
        assert json.loads(render_report(report))["command"] == "search-narrative"

    def test_render_rounds_floats(self):
        report = ResultReport(command="solve", result={"alpha": 0.123456789, "items": [1.98769]})
        data = json.loads(render_report(report, digits=3))
        assert data["result"] == {"alpha": 0.123, "items": [1.988]}

    def test_write_report(self, tmp_path):
        report = ResultReport(command="solve", result={"alpha": 0.5})
        path = tmp_path / "out.json"
        text = write_report(report, path)
        assert path.read_text(encoding="utf-8") == text + "\n"
