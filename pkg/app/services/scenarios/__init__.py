"""
시나리오 설정, 내장 검증 시나리오, 실행기
"""
from app.services.scenarios.loader import (
    BUILTIN_DIR,
    build_problem,
    emit_scenario,
    expand_dags,
    expand_families,
    list_builtins,
    load_scenario,
    parse_scenario,
    parse_scenario_text,
    read_json,
    with_overrides,
)
from app.services.scenarios.oracles import ORACLES
from app.services.scenarios.runner import (
    SWEEP_PARAMS,
    parse_distribution,
    parse_range,
    render_report,
    run_linearize,
    run_search,
    run_solve,
    run_sweep,
    run_verify,
    write_report,
    write_sweep,
)
from app.services.scenarios.schema import (
    SCHEMA_VERSION,
    Comparison,
    CostSpec,
    DagEnumeration,
    DagSpec,
    FamilySpec,
    ResultReport,
    ScenarioConfig,
    SolverSpec,
)

__all__ = [
    "BUILTIN_DIR",
    "ORACLES",
    "SCHEMA_VERSION",
    "SWEEP_PARAMS",
    "Comparison",
    "CostSpec",
    "DagEnumeration",
    "DagSpec",
    "FamilySpec",
    "ResultReport",
    "ScenarioConfig",
    "SolverSpec",
    "build_problem",
    "emit_scenario",
    "expand_dags",
    "expand_families",
    "list_builtins",
    "load_scenario",
    "parse_distribution",
    "parse_range",
    "parse_scenario",
    "parse_scenario_text",
    "read_json",
    "render_report",
    "run_linearize",
    "run_search",
    "run_solve",
    "run_sweep",
    "run_verify",
    "with_overrides",
    "write_report",
    "write_sweep",
]
