"""Command-line front end.

Commands: solve, analyze, audit, gen, enumerate-rank-minimal. All output
documents are JSON on stdout (or --out); solve documents re-feed directly
into analyze. Exit codes: 0 success, 2 parse/validation failure, 3 invalid
transform, 4 size guard exceeded, 10 audit found a profitable misreport.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import MatchingReport, build_report
from .enumeration import (
    DEFAULT_CAP,
    TieBreakCriterion,
    TieBreakPolicy,
    enumerate_rank_minimal,
    solve_with_optima,
    tiebreak_select,
    uniform_pick,
)
from .errors import (
    EnumerationIncompleteError,
    FormatError,
    GuardExceededError,
    InvalidMatchingError,
    InvalidProblemError,
    TransformError,
    UnknownIdError,
)
from .formats import (
    load_matching,
    load_problem,
    load_students_csv,
    render_cost,
    serialize_problem,
)
from .generate import InstanceSpec, generate_instance
from .model import Matching, SchoolChoiceProblem, require_valid
from .report import write_report
from .strategy import StrategyReport, exhaustive_best_response
from .transforms import describe_transform, parse_transform_spec, resolve_transform

DEFAULT_TRANSFORM = "linear:a=1,b=-1"


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_validated(args: argparse.Namespace) -> SchoolChoiceProblem:
    if getattr(args, "from_csv", False):
        problem = load_students_csv(args.instance, args.default_capacity)
    else:
        problem = load_problem(args.instance)
    require_valid(problem)
    return problem


def _parse_tiebreak(spec: str) -> tuple[TieBreakCriterion, ...]:
    by_value = {c.value: c for c in TieBreakCriterion}
    criteria = []
    for name in spec.split(","):
        name = name.strip()
        if name not in by_value:
            raise FormatError(
                f"unknown tie-break criterion {name!r}; "
                f"choose from {sorted(by_value)}"
            )
        criteria.append(by_value[name])
    return tuple(criteria)


def _receivable_list(schools: frozenset[str | None]) -> list[str | None]:
    ids = sorted(s for s in schools if s is not None)
    if None in schools:
        ids.append(None)
    return ids


def _trace_doc(trace, exhaustive: bool) -> dict:
    return {
        "iterations": trace.iterations,
        "grid_side": len(trace.final_reduced),
        "truncated_enumeration": not exhaustive,
    }


def cmd_solve(args: argparse.Namespace) -> int:
    problem = _load_validated(args)
    transform = resolve_transform(parse_transform_spec(args.transform), problem)
    optima, trace, kernel = solve_with_optima(problem, transform, args.cap)
    if args.tiebreak:
        policy = TieBreakPolicy(_parse_tiebreak(args.tiebreak), args.seed)
        chosen = tiebreak_select(problem, optima, policy)
    elif not optima.exhaustive:
        chosen = kernel
    else:
        chosen = uniform_pick(optima.matchings, args.seed)
    report = build_report(problem, chosen, transform)
    doc = {
        "matching": chosen.to_dict(),
        "transform": describe_transform(transform),
        "cost": render_cost(optima.shared_cost),
        "preference_index": report.preference_index,
        "rank": report.rank,
        "violated_students": sorted(report.violated_students),
        "optima_count": len(optima.matchings),
        "exhaustive": optima.exhaustive,
        "seed": args.seed,
        "tiebreak": list(args.tiebreak.split(",")) if args.tiebreak else [],
        "trace": _trace_doc(trace, optima.exhaustive),
    }
    if args.all:
        doc["optima"] = [
            m.to_dict() for m in sorted(optima.matchings, key=Matching.sort_key)
        ]
    if args.report:
        write_report(args.report, problem, chosen, report)
    _emit(doc, args.out)
    return 0


def _report_doc(report: MatchingReport, matching: Matching, transform) -> dict:
    return {
        "matching": matching.to_dict(),
        "transform": describe_transform(transform),
        "cost": render_cost(report.cost),
        "preference_index": report.preference_index,
        "rank": report.rank,
        "signature": list(report.signature),
        "violated_students": sorted(report.violated_students),
        "violation_pairs": sorted(list(p) for p in report.violation_pairs),
        "pareto": report.pareto,
        "dominated_by": report.dominated_by.to_dict() if report.dominated_by else None,
    }


def cmd_analyze(args: argparse.Namespace) -> int:
    problem = _load_validated(args)
    matching = load_matching(problem, args.matching)
    transform = resolve_transform(parse_transform_spec(args.transform), problem)
    report = build_report(problem, matching, transform)
    if args.report:
        write_report(args.report, problem, matching, report)
    _emit(_report_doc(report, matching, transform), args.out)
    return 4 if report.pareto == "skipped" else 0


def _audit_doc(report: StrategyReport, seed: int) -> dict:
    misreport = None
    if report.best_misreport is not None:
        misreport = [next(iter(t)) for t in report.best_misreport.tiers]
    return {
        "student": report.student,
        "truthful_expected_cost": render_cost(report.truthful_expected_cost),
        "best_misreport": misreport,
        "misreport_expected_cost": (
            None
            if report.misreport_expected_cost is None
            else render_cost(report.misreport_expected_cost)
        ),
        "receivable_truthful": _receivable_list(report.receivable_truthful),
        "receivable_after": _receivable_list(report.receivable_after),
        "profitable": report.best_misreport is not None,
        "seed": seed,
    }


def cmd_audit(args: argparse.Namespace) -> int:
    problem = _load_validated(args)
    transform = resolve_transform(parse_transform_spec(args.transform), problem)
    if args.student is not None:
        problem.student(args.student)
        targets = [args.student]
    else:
        targets = list(problem.student_ids)
    reports = [
        exhaustive_best_response(problem, s, transform, args.cap_schools)
        for s in targets
    ]
    if len(reports) == 1 and args.student is not None:
        doc = _audit_doc(reports[0], args.seed)
        doc["transform"] = describe_transform(transform)
    else:
        doc = {
            "transform": describe_transform(transform),
            "students": [_audit_doc(r, args.seed) for r in reports],
        }
    _emit(doc, args.out)
    return 10 if any(r.best_misreport is not None for r in reports) else 0


def cmd_gen(args: argparse.Namespace) -> int:
    try:
        spec = InstanceSpec(
            students=args.students,
            schools=args.schools,
            cap_min=args.cap_min,
            cap_max=args.cap_max,
            tie_prob=args.ties,
            incomplete_prob=args.incomplete,
            skew=args.skew,
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = serialize_problem(generate_instance(spec))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_enumerate_rank_minimal(args: argparse.Namespace) -> int:
    from .analysis import matching_rank

    problem = _load_validated(args)
    matchings = sorted(enumerate_rank_minimal(problem), key=Matching.sort_key)
    doc = {
        "count": len(matchings),
        "rank": matching_rank(problem, matchings[0]) if matchings else None,
        "matchings": [m.to_dict() for m in matchings],
    }
    _emit(doc, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osmatch",
        description="One-sided school-choice matching via cost minimization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run the mechanism on an instance")
    solve.add_argument("instance", help="instance document path")
    solve.add_argument("--transform", default=DEFAULT_TRANSFORM)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument(
        "--tiebreak",
        default=None,
        help="comma list of criteria: variance, violations",
    )
    solve.add_argument("--all", action="store_true", help="emit every optimum")
    solve.add_argument("--cap", type=int, default=DEFAULT_CAP)
    solve.add_argument("--out", default=None)
    solve.add_argument("--report", default=None, help="directory for CSVs and figures")
    solve.add_argument(
        "--from-csv",
        action="store_true",
        help="instance is a student,choice1..choiceK CSV",
    )
    solve.add_argument("--default-capacity", type=int, default=1)
    solve.set_defaults(func=cmd_solve)

    analyze = sub.add_parser("analyze", help="score an existing matching")
    analyze.add_argument("instance")
    analyze.add_argument("matching", help="matching document (bare map or solve output)")
    analyze.add_argument("--transform", default=DEFAULT_TRANSFORM)
    analyze.add_argument("--out", default=None)
    analyze.add_argument("--report", default=None)
    analyze.set_defaults(func=cmd_analyze)

    audit = sub.add_parser("audit", help="exhaustive misreport search")
    audit.add_argument("instance")
    audit.add_argument("--student", default=None, help="default: audit every student")
    audit.add_argument("--transform", default=DEFAULT_TRANSFORM)
    audit.add_argument("--cap-schools", type=int, default=7)
    audit.add_argument(
        "--seed",
        type=int,
        default=0,
        help="recorded in the document; expectations are exact and draw nothing",
    )
    audit.add_argument("--out", default=None)
    audit.set_defaults(func=cmd_audit)

    gen = sub.add_parser("gen", help="generate a reproducible instance")
    gen.add_argument("--students", type=int, required=True)
    gen.add_argument("--schools", type=int, required=True)
    gen.add_argument("--cap-min", type=int, default=1)
    gen.add_argument("--cap-max", type=int, default=1)
    gen.add_argument("--ties", type=float, default=0.0)
    gen.add_argument("--incomplete", type=float, default=0.0)
    gen.add_argument("--skew", type=float, default=0.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=cmd_gen)

    enum_rank = sub.add_parser(
        "enumerate-rank-minimal",
        help="list every matching with the minimum achievable rank",
    )
    enum_rank.add_argument("instance")
    enum_rank.add_argument("--out", default=None)
    enum_rank.set_defaults(func=cmd_enumerate_rank_minimal)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidProblemError as exc:
        for violation in exc.violations:
            print(f"error: {violation}", file=sys.stderr)
        return 2
    except (FormatError, InvalidMatchingError, UnknownIdError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TransformError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (GuardExceededError, EnumerationIncompleteError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
