#!/usr/bin/env python3
"""
서사 균형 툴킷 명령줄 인터페이스

종료 코드: 0 성공, 1 검증 실패, 2 설정/입력 오류, 3 균형 탐색 실패
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

from app.config import settings
from app.core.exceptions import ConfigError, DomainError, SolverError, UnsupportedStructureError, ValidationError
from app.core.logging import setup_logging
from app.services.scenarios import (
    list_builtins,
    load_scenario,
    read_json,
    run_linearize,
    run_search,
    run_solve,
    run_sweep,
    run_verify,
    write_report,
    write_sweep,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="narratives",
        description="Solve and verify narrative-competition equilibria over causal DAG narratives.",
    )
    parser.add_argument("--log-level", default=settings.log_level, help="Logging level (default from settings).")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="Solve a scenario for its equilibrium.")
    solve.add_argument("--scenario", required=True, help="Builtin name or path to a scenario JSON file.")
    solve.add_argument("--out", help="Path to write the JSON report (stdout when omitted).")
    solve.add_argument("--scan", action="store_true", help="Include the scanned g(alpha) table.")

    verify = sub.add_parser("verify", help="Check a builtin scenario against its closed form.")
    verify.add_argument("builtin", help="Builtin scenario name.")
    verify.add_argument("--k", type=float, help="Quadratic cost coefficient override.")
    verify.add_argument("--eps", type=float, help="Policy domain margin override.")
    verify.add_argument("--delta", type=float, help="Full-support perturbation override.")
    verify.add_argument("--d-star", type=float, dest="d_star", help="Ideal policy override.")
    verify.add_argument("--out", help="Path to write the JSON report.")

    sweep = sub.add_parser("sweep", help="Solve over a parameter range and write CSV.")
    sweep.add_argument("--scenario", required=True, help="Builtin name or path to a scenario JSON file.")
    sweep.add_argument("--param", required=True, help="Parameter to vary (k, r, mu, d_star, epsilon, delta).")
    sweep.add_argument("--range", required=True, dest="values", help="Inclusive range A:B:STEP.")
    sweep.add_argument("--out", required=True, help="Path to write the CSV table.")
    sweep.add_argument("--workers", type=int, help="Thread pool size (default from settings).")

    search = sub.add_parser("search-narrative", help="Search the conditional family maximizing p(y=1|a).")
    search.add_argument("--dag", required=True, choices=["lever", "collider"])
    search.add_argument("--alpha", required=True, type=float)
    search.add_argument("--mu", required=True, type=float)
    search.add_argument("--target", type=int, default=1, choices=[0, 1])
    search.add_argument("--grid", type=float, help="Optional grid spacing h for a dense search.")
    search.add_argument("--delta", type=float, default=1e-6)
    search.add_argument("--out", help="Path to write the JSON report.")

    linearize = sub.add_parser("linearize", help="Reduce a perfect-DAG belief to a linear chain.")
    linearize.add_argument("--dag", required=True, help="Path to a DAG JSON file.")
    linearize.add_argument("--dist", required=True, help="Path to a distribution JSON file.")
    linearize.add_argument("--out", help="Path to write the JSON report.")

    serve = sub.add_parser("serve", help="Start the HTTP API server.")
    serve.add_argument("--host", default=settings.host)
    serve.add_argument("--port", type=int, default=settings.port)

    sub.add_parser("list", help="List builtin scenarios.")
    return parser


def _emit(report, out: Optional[str]) -> None:
    text = write_report(report, out)
    if out is None:
        print(text)


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "solve":
        report = run_solve(load_scenario(args.scenario), include_scan=args.scan)
        _emit(report, args.out)
        return EXIT_VERIFY_FAILED if report.passed is False else EXIT_OK

    if args.command == "verify":
        report = run_verify(args.builtin, k=args.k, eps=args.eps, delta=args.delta, d_star=args.d_star)
        _emit(report, args.out)
        return EXIT_OK if report.passed else EXIT_VERIFY_FAILED

    if args.command == "sweep":
        frame = run_sweep(load_scenario(args.scenario), args.param, args.values, workers=args.workers)
        write_sweep(frame, args.out)
        logger.info(f"💾 스윕 결과 저장: {args.out} ({len(frame)}행)")
        return EXIT_OK

    if args.command == "search-narrative":
        report = run_search(args.dag, args.alpha, args.mu, target=args.target, grid=args.grid, delta=args.delta)
        _emit(report, args.out)
        return EXIT_OK

    if args.command == "linearize":
        report = run_linearize(read_json(args.dag, "dag"), read_json(args.dist, "dist"))
        _emit(report, args.out)
        return EXIT_OK

    if args.command == "serve":
        from app.main import serve

        serve(host=args.host, port=args.port)
        return EXIT_OK

    print(json.dumps(list_builtins(), indent=2))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        return _dispatch(args)
    except (ConfigError, DomainError, ValidationError, UnsupportedStructureError) as e:
        logger.error(f"설정 오류: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as e:
        logger.error(f"균형 탐색 실패: {e}")
        print(json.dumps(e.to_dict(), indent=2), file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    raise SystemExit(main())
