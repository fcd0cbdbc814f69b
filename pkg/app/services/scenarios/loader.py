"""
시나리오 로더
내장 시나리오/파일 로드, 분포족·DAG 생성기 전개, 균형 문제 구성
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from app.core.exceptions import ConfigError, NarrativeError
from app.services.dag import CausalDag, enumerate_dags
from app.services.equilibrium import EquilibriumProblem, SolverOptions
from app.services.narrative import CostFunction
from app.services.probability import (
    ConditionalFamily,
    corner_families,
    grid_families,
    mirror_closure,
    random_family,
)
from app.services.scenarios.schema import DagEnumeration, FamilySpec, ScenarioConfig

logger = logging.getLogger(__name__)

BUILTIN_DIR = Path(__file__).resolve().parents[2] / "data" / "scenarios"


def list_builtins() -> List[str]:
    return sorted(p.stem for p in BUILTIN_DIR.glob("*.json"))


def _field_path(loc) -> str:
    path = ""
    for item in loc:
        if isinstance(item, int):
            path += f"[{item}]"
        else:
            path += f".{item}" if path else str(item)
    return path


def parse_scenario(data: Dict[str, Any]) -> ScenarioConfig:
    """dict → ScenarioConfig (오류는 필드 경로를 담은 ConfigError)"""
    try:
        return ScenarioConfig.model_validate(data)
    except PydanticValidationError as e:
        first = e.errors()[0]
        raise ConfigError(f"시나리오 검증 실패: {first['msg']}", field=_field_path(first["loc"])) from e


def parse_scenario_text(text: str) -> ScenarioConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON 구문 오류: {e.msg}", line=e.lineno, column=e.colno) from e
    if not isinstance(data, dict):
        raise ConfigError("시나리오 최상위 값은 객체여야 합니다")
    return parse_scenario(data)


def load_scenario(source: Union[str, Path]) -> ScenarioConfig:
    """내장 시나리오 이름 또는 JSON 파일 경로로 로드"""
    name = str(source)
    builtin = BUILTIN_DIR / f"{name}.json"
    if name in list_builtins():
        path = builtin
    else:
        path = Path(name)
        if not path.is_file():
            raise ConfigError(
                f"알 수 없는 시나리오 '{name}' - 내장 시나리오: {', '.join(list_builtins())}"
            )
    config = parse_scenario_text(path.read_text(encoding="utf-8"))
    logger.info(f"📄 시나리오 로드: {config.name or path.name}")
    return config


def emit_scenario(config: ScenarioConfig) -> str:
    return config.model_dump_json(indent=2)


def with_overrides(config: ScenarioConfig, **params: Any) -> ScenarioConfig:
    """매개변수 덮어쓰기 (k, r은 cost 블록으로)"""
    data = config.model_dump(mode="json")
    for key, value in params.items():
        if value is None:
            continue
        if key in ("k", "r"):
            data["cost"][key] = value
        elif key in ("eps", "epsilon"):
            data["epsilon"] = value
        elif key in ScenarioConfig.model_fields:
            data[key] = value
        else:
            raise ConfigError(f"덮어쓸 수 없는 매개변수: {key}", field=key)
    return parse_scenario(data)


# === 생성기 전개 ===

def expand_families(config: ScenarioConfig) -> List[ConditionalFamily]:
    """q_set 항목을 순서대로 전개 (mirror-closure는 앞선 항목 전체에 적용)"""
    rng = np.random.default_rng(config.seed)
    families: List[ConditionalFamily] = []
    for index, entry in enumerate(config.q_set):
        where = f"q_set[{index}]"
        try:
            if isinstance(entry, FamilySpec):
                families.append(
                    ConditionalFamily.from_rows(
                        entry.rows, config.n, entry.label or f"q{index}", delta_order=entry.delta_order
                    )
                )
            elif entry == "corners":
                families.extend(corner_families(config.n))
            elif entry.startswith("grid:"):
                if config.n != 3:
                    raise ConfigError("grid 생성기는 n=3에서만 지원됩니다", field=where)
                families.extend(grid_families(float(entry.split(":", 1)[1])))
            elif entry.startswith("random:"):
                count = int(entry.split(":", 1)[1])
                if count < 1:
                    raise ConfigError("random:K 의 K는 1 이상이어야 합니다", field=where)
                families.extend(
                    random_family(config.n, rng, label=f"random:{len(families) + k}") for k in range(count)
                )
            elif entry == "mirror-closure":
                families = mirror_closure(families)
            else:
                raise ConfigError(f"알 수 없는 분포족 생성기: {entry}", field=where)
        except ConfigError:
            raise
        except (NarrativeError, ValueError) as e:
            raise ConfigError(str(e), field=where) from e
    if not families:
        raise ConfigError("생성 후 분포족 집합이 비어 있습니다", field="q_set")
    return families


def expand_dags(config: ScenarioConfig) -> List[CausalDag]:
    try:
        if isinstance(config.dag_set, DagEnumeration):
            options = config.dag_set
            return enumerate_dags(
                config.n,
                max_nodes=options.max_nodes,
                perfect_only=options.perfect_only,
                action_ancestral=options.action_ancestral,
                exclude=[CausalDag.from_spec(d.model_dump()) for d in options.exclude],
            )
        return [CausalDag.from_spec(d.model_dump()) for d in config.dag_set]
    except NarrativeError as e:
        raise ConfigError(str(e), field="dag_set") from e


def build_problem(config: ScenarioConfig) -> EquilibriumProblem:
    """ScenarioConfig → EquilibriumProblem"""
    families = expand_families(config)
    dags = expand_dags(config)
    try:
        problem = EquilibriumProblem(
            n=config.n,
            mu=config.mu,
            d_star=config.d_star,
            cost=CostFunction(kind=config.cost.kind, k=config.cost.k, r=config.cost.r),
            families=tuple(families),
            dags=tuple(dags),
            epsilon=config.epsilon,
            delta=config.delta,
            options=SolverOptions(
                tie_tol=config.solver.tie_tol,
                re_tol=config.solver.re_tol,
                scan_points=config.solver.scan_points,
                xtol=config.solver.xtol,
            ),
        )
    except NarrativeError as e:
        raise ConfigError(str(e)) from e
    logger.debug(f"균형 문제 구성: 분포족 {len(families)}개 × DAG {len(dags)}개")
    return problem


def read_json(path: Union[str, Path], field: str) -> Dict[str, Any]:
    """DAG·분포 명세 같은 보조 JSON 파일 읽기"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"파일을 찾을 수 없습니다: {path}", field=field)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON 구문 오류: {e.msg}", field=field, line=e.lineno, column=e.colno) from e
    if not isinstance(data, dict):
        raise ConfigError("최상위 값은 객체여야 합니다", field=field)
    return data
