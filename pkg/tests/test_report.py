"""Report directory output: delimited tables plus rendered figures."""

from __future__ import annotations

import csv

from conftest import (
    F1,
    dominated_pair_matchings,
    dominated_pair_problem,
    matching_of,
    problem_of,
    strict,
)
from osmatch.analysis import build_report
from osmatch.report import write_report

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def _rows(path):
    return list(csv.reader(path.read_text().splitlines()))


def test_report_directory_contains_tables_and_figures(tmp_path):
    problem = dominated_pair_problem()
    _, dear = dominated_pair_matchings(problem)
    report = build_report(problem, dear, F1)
    out = tmp_path / "nested" / "report"
    paths = write_report(out, problem, dear, report)
    assert len(paths) == 4
    names = {p.name for p in paths}
    assert names == {
        "assignments.csv",
        "summary.csv",
        "rank_distribution.png",
        "school_fill.png",
    }
    for path in paths:
        assert path.exists()
        assert path.stat().st_size > 0
        if path.suffix == ".png":
            assert path.read_bytes()[:8] == PNG_SIGNATURE


def test_assignments_table_lists_one_row_per_student(tmp_path):
    problem = dominated_pair_problem()
    _, dear = dominated_pair_matchings(problem)
    report = build_report(problem, dear, F1)
    write_report(tmp_path, problem, dear, report)
    rows = _rows(tmp_path / "assignments.csv")
    header, *body = rows
    assert header[:2] == ["student", "school"]
    assert [row[0] for row in body] == ["i1", "i2", "i3"]
    by_student = {row[0]: row for row in body}
    assert by_student["i1"][1] == "s2"
    assert by_student["i1"][2] == "2"  # rank of the assigned school


def test_summary_table_carries_the_report_metrics(tmp_path):
    problem = dominated_pair_problem()
    _, dear = dominated_pair_matchings(problem)
    report = build_report(problem, dear, F1)
    write_report(tmp_path, problem, dear, report)
    summary = dict(
        (row[0], row[1]) for row in _rows(tmp_path / "summary.csv")[1:]
    )
    assert summary["preference_index"] == "3"
    assert summary["rank"] == "2"
    assert summary["cost"] == "3"
    assert summary["pareto"] == "dominated"


def test_report_handles_unassigned_students(tmp_path):
    problem = problem_of(
        {"i1": strict("s1"), "i2": strict("s1")},
        {"s1": 1},
    )
    matching = matching_of(problem, i1="s1")
    report = build_report(problem, matching, F1)
    paths = write_report(tmp_path, problem, matching, report)
    rows = _rows(tmp_path / "assignments.csv")
    by_student = {row[0]: row for row in rows[1:]}
    assert by_student["i2"][1] == ""
    assert all(p.stat().st_size > 0 for p in paths)
