"""
통합 테스트: 명령줄 인터페이스 종료 코드와 출력
"""
import json

import pandas as pd
import pytest

from app.cli import EXIT_CONFIG, EXIT_OK, main

pytestmark = pytest.mark.integration


class TestCli:
    """narratives 명령 테스트"""

    def test_list(self, capsys):
        assert main(["list"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out) == [
            "claim1", "claim2", "opportunity", "short-narratives",
        ]

    def test_verify_writes_report(self, tmp_path):
        out = tmp_path / "claim1.json"
        assert main(["verify", "claim1", "--out", str(out)]) == EXIT_OK
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["command"] == "verify"
        assert report["passed"] is True
        assert all(c["passed"] for c in report["comparisons"])

    def test_verify_unknown_builtin(self, capsys):
        assert main(["verify", "claim9"]) == EXIT_CONFIG
        assert "claim1" in capsys.readouterr().err

    def test_solve_custom_scenario(self, tmp_path, capsys):
        scenario = tmp_path / "lever.json"
        scenario.write_text(json.dumps({
            "n": 3,
            "mu": 0.5,
            "d_star": 0.5,
            "q_set": ["random:1", "mirror-closure"],
            "dag_set": [{"nodes": [1, 2, 3], "edges": [[1, 2], [2, 3]]}],
            "solver": {"scan_points": 128},
            "seed": 3,
        }), encoding="utf-8")
        assert main(["solve", "--scenario", str(scenario)]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["command"] == "solve"
        assert report["passed"] is None
        assert report["checks"]["consistency"]["passed"]

    def test_bad_scenario_path(self, tmp_path):
        assert main(["solve", "--scenario", str(tmp_path / "missing.json")]) == EXIT_CONFIG

    def test_bad_scenario_content(self, tmp_path, capsys):
        scenario = tmp_path / "bad.json"
        scenario.write_text('{"n": 3, "mu": 2.0, "d_star": 0.5, "q_set": ["corners"]}', encoding="utf-8")
        assert main(["solve", "--scenario", str(scenario)]) == EXIT_CONFIG
        assert "mu" in capsys.readouterr().err

    def test_search_narrative(self, tmp_path):
        out = tmp_path / "search.json"
        code = main([
            "search-narrative", "--dag", "collider", "--alpha", "0.3", "--mu", "0.6", "--out", str(out),
        ])
        assert code == EXIT_OK
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["result"]["value"] == pytest.approx(1 - 0.3 * 0.4, abs=1e-4)

    def test_search_narrative_domain_error(self):
        assert main(["search-narrative", "--dag", "lever", "--alpha", "1.5", "--mu", "0.5"]) == EXIT_CONFIG

    def test_invalid_choice_exits(self):
        with pytest.raises(SystemExit) as exc:
            main(["search-narrative", "--dag", "fork", "--alpha", "0.3", "--mu", "0.6"])
        assert exc.value.code == 2

    def test_sweep_writes_csv(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main([
            "sweep", "--scenario", "claim1", "--param", "k", "--range", "1.0:1.2:0.1", "--out", str(out),
        ])
        assert code == EXIT_OK
        frame = pd.read_csv(out)
        assert list(frame["k"]) == [1.0, 1.1, 1.2]
        assert (frame["kind"] == "mixed").all()

    def test_sweep_bad_range(self, tmp_path):
        code = main([
            "sweep", "--scenario", "claim1", "--param", "k", "--range", "2:1:0.1",
            "--out", str(tmp_path / "x.csv"),
        ])
        assert code == EXIT_CONFIG

    def test_linearize(self, tmp_path, capsys):
        dag = tmp_path / "dag.json"
        dist = tmp_path / "dist.json"
        dag.write_text(json.dumps({"nodes": [1, 2, 3, 4], "edges": [[1, 2], [1, 3], [2, 3], [2, 4], [3, 4]]}))
        dist.write_text(json.dumps({
            "alpha": 0.4,
            "mu": 0.3,
            "rows": [[0.1, 0.2, 0.3, 0.4], [0.25, 0.25, 0.25, 0.25], [0.4, 0.3, 0.2, 0.1], [0.7, 0.1, 0.1, 0.1]],
        }))
        assert main(["linearize", "--dag", str(dag), "--dist", str(dist)]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["result"]["reduction"]["separators"] == [[2, 3]]
        assert report["checks"]["exhaustive_candidates"] == 4

    def test_linearize_imperfect(self, tmp_path):
        dag = tmp_path / "dag.json"
        dist = tmp_path / "dist.json"
        dag.write_text(json.dumps({"nodes": [1, 2, 3], "edges": [[1, 3], [2, 3]]}))
        dist.write_text(json.dumps({"alpha": 0.4, "mu": 0.3, "rows": [[0.5, 0.5]] * 4}))
        assert main(["linearize", "--dag", str(dag), "--dist", str(dist)]) == EXIT_CONFIG
