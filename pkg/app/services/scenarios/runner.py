"""
시나리오 실행기
solve / verify / sweep / search / linearize 결과를 ResultReport로 조립
"""
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from app.config import settings
from app.core.exceptions import ConfigError
from app.services.dag import COLLIDER, LEVER, CausalDag
from app.services.equilibrium import (
    consistency_check,
    is_rich,
    optimal_narrative_search,
    polarization_summary,
    solve,
)
from app.services.linearization import (
    binarize_chain,
    binarize_exhaustive,
    clique_factor_belief,
    reduce_to_chain,
)
from app.services.narrative import factorize
from app.services.probability import ConditionalFamily, JointDistribution, build_joint
from app.services.scenarios.loader import build_problem, load_scenario, with_overrides
from app.services.scenarios.oracles import ORACLES
from app.services.scenarios.schema import ResultReport, ScenarioConfig

logger = logging.getLogger(__name__)

SWEEP_PARAMS = ("k", "r", "mu", "d_star", "epsilon", "eps", "delta")
SEARCH_DAGS = {"lever": LEVER, "collider": COLLIDER}
SWEEP_COLUMNS = ("alpha", "kind", "d_r", "d_l", "weight_r", "u_star", "bias", "roots")


def run_solve(config: ScenarioConfig, include_scan: bool = False) -> ResultReport:
    """시나리오 균형 풀이 + 균형 조건/양극화/풍부성 점검"""
    problem = build_problem(config)
    solution = solve(problem, include_scan=include_scan)
    consistency = consistency_check(solution, problem)
    richness = is_rich(problem)
    checks: Dict[str, Any] = {
        "consistency": consistency.to_dict(),
        "polarization": polarization_summary(solution),
        "richness": {
            "rich": richness.rich,
            "mirror_closed": richness.mirror_closed,
            "distorted_everywhere": richness.distorted_everywhere,
            "undistorted_alphas": richness.undistorted_alphas,
        },
        "narratives": len(problem.narratives),
    }
    report = ResultReport(
        command="solve",
        scenario=config,
        result=solution.to_dict(),
        checks=checks,
        citation=config.citation,
    )
    oracle = ORACLES.get(config.name or "")
    if oracle is not None:
        report.comparisons = oracle(config, solution)
        report.passed = all(c.passed for c in report.comparisons)
    return report


def run_verify(
    builtin: str,
    k: Optional[float] = None,
    eps: Optional[float] = None,
    delta: Optional[float] = None,
    d_star: Optional[float] = None,
) -> ResultReport:
    """내장 시나리오를 풀고 닫힌 형태 값과 비교"""
    if builtin not in ORACLES:
        raise ConfigError(
            f"검증 오라클이 없는 시나리오: '{builtin}' - 검증 가능: {', '.join(sorted(ORACLES))}"
        )
    config = with_overrides(load_scenario(builtin), k=k, epsilon=eps, delta=delta, d_star=d_star)
    report = run_solve(config)
    report.command = "verify"
    if report.passed:
        logger.info(f"✅ 검증 통과: {builtin}")
    else:
        failed = [c.quantity for c in report.comparisons or [] if not c.passed]
        logger.warning(f"❌ 검증 실패: {builtin} ({', '.join(failed)})")
    return report


# === 매개변수 스윕 ===

def parse_range(text: str) -> List[float]:
    """'A:B:STEP' → [A, A+STEP, …, B] (끝점 포함)"""
    try:
        start, stop, step = (float(part) for part in text.split(":"))
    except ValueError as e:
        raise ConfigError(f"범위 형식은 A:B:STEP 이어야 합니다: '{text}'", field="range") from e
    if step <= 0 or stop < start:
        raise ConfigError(f"범위가 비어 있거나 STEP이 양수가 아닙니다: '{text}'", field="range")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def _sweep_point(config: ScenarioConfig, param: str, value: float) -> Dict[str, Any]:
    solution = solve(build_problem(with_overrides(config, **{param: value})))
    weights = solution.policy_weights()
    return {
        param: value,
        "alpha": solution.alpha,
        "kind": solution.kind,
        "d_r": weights[0][0],
        "d_l": weights[-1][0],
        "weight_r": weights[0][1],
        "u_star": solution.u_star,
        "bias": solution.bias,
        "roots": len(solution.roots),
    }


def run_sweep(
    config: ScenarioConfig, param: str, values: Union[str, List[float]], workers: Optional[int] = None
) -> pd.DataFrame:
    """매개변수 격자마다 균형을 풀어 표로 조립 (매개변수 순서 유지)"""
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"스윕할 수 없는 매개변수: {param} ({', '.join(SWEEP_PARAMS)})", field="param")
    grid = parse_range(values) if isinstance(values, str) else [float(v) for v in values]
    workers = workers or settings.sweep_workers
    logger.info(f"🔁 스윕 시작: {param} {len(grid)}개 지점, 작업자 {workers}개")

    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(lambda v: _sweep_point(config, param, v), grid))

    logger.info(f"스윕 완료: {len(rows)}개 지점")
    return pd.DataFrame(rows, columns=(param,) + SWEEP_COLUMNS)


def write_sweep(frame: pd.DataFrame, path: Union[str, Path]) -> None:
    frame.to_csv(path, index=False, float_format="%.12g")


# === 탐색 / 선형화 ===

def run_search(
    dag: str,
    alpha: float,
    mu: float,
    target: int = 1,
    grid: Optional[float] = None,
    delta: float = 1e-6,
) -> ResultReport:
    """lever/collider DAG의 최적 분포족 탐색과 닫힌 형태 상한 비교"""
    if dag not in SEARCH_DAGS:
        raise ConfigError(f"지원하지 않는 DAG: '{dag}' (lever, collider)", field="dag")
    result = optimal_narrative_search(SEARCH_DAGS[dag], alpha, mu, target=target, delta=delta, grid=grid)
    return ResultReport(
        command="search-narrative",
        result={"alpha": alpha, "mu": mu, **result.to_dict()},
        checks={"within_bound": result.value <= result.bound + 1e-9, "gap": result.gap},
    )


def parse_distribution(spec: Dict[str, Any]) -> JointDistribution:
    """{"n", "table"} 또는 {"alpha", "mu", "rows"} 형식의 분포 명세"""
    if "table" in spec:
        table = spec["table"]
        n = int(spec.get("n") or round(np.log2(len(table))))
        return JointDistribution(n=n, table=np.asarray(table, dtype=float))
    if {"alpha", "mu", "rows"} <= spec.keys():
        rows = spec["rows"]
        n = int(spec.get("n") or round(np.log2(len(rows[0]))) + 2)
        family = ConditionalFamily.from_rows(rows, n, spec.get("label"))
        return build_joint(float(spec["alpha"]), float(spec["mu"]), family)
    raise ConfigError("분포 명세에는 table 또는 (alpha, mu, rows)가 필요합니다", field="dist")


def run_linearize(dag_spec: Dict[str, Any], dist_spec: Dict[str, Any]) -> ResultReport:
    """완전 DAG 신념의 사슬 환원과 이진화"""
    dag = CausalDag.from_spec(dag_spec)
    p = parse_distribution(dist_spec)
    reduction = reduce_to_chain(p, dag)
    binarized = binarize_chain(reduction)
    results, best = binarize_exhaustive(reduction)

    belief = factorize(p, dag)
    clique = clique_factor_belief(p, dag)
    chain_error = float(np.max(np.abs(reduction.chain_outcome() - reduction.target)))
    singleton = all(len(s) == 1 for s in reduction.separators)
    checks = {
        "chain_exact": chain_error,
        "clique_factor_agreement": float(np.max(np.abs(clique.table - belief.table))),
        "chain_nodes_within_n": reduction.chain_length <= p.n,
        "singleton_separators": singleton,
        "exhaustive_min_deviation": best.deviation,
        "exhaustive_candidates": len(results),
    }
    return ResultReport(
        command="linearize",
        result={
            "reduction": reduction.to_dict(),
            "binarized": binarized.to_dict(),
            "best_binarized": best.to_dict(),
        },
        checks=checks,
    )


# === 리포트 출력 ===

def _round_floats(value: Any, digits: int) -> Any:
    if isinstance(value, float):
        return round(value, digits)
    if isinstance(value, list):
        return [_round_floats(v, digits) for v in value]
    if isinstance(value, dict):
        return {k: _round_floats(v, digits) for k, v in value.items()}
    return value


def render_report(report: ResultReport, digits: Optional[int] = None) -> str:
    """결정적 JSON 직렬화 (digits가 주어지면 실수 반올림)"""
    digits = settings.report_float_digits if digits is None else digits
    if digits is None:
        return report.model_dump_json(indent=2)
    return json.dumps(_round_floats(report.model_dump(mode="json"), digits), indent=2, ensure_ascii=False)


def write_report(report: ResultReport, path: Optional[Union[str, Path]] = None) -> str:
    text = render_report(report)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
        logger.info(f"💾 리포트 저장: {path}")
    return text
