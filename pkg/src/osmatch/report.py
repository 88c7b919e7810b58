"""Report rendering: per-student CSV tables plus matplotlib figures.

write_report produces, inside the target directory:

    assignments.csv        student, school, rank, index, violated
    summary.csv            one metric per row
    rank_distribution.png  bar chart of effective ranks (last bar: unassigned)
    school_fill.png        per-school fill against capacity

The delimited files carry the exact numbers; the figures are the same data
drawn for humans.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .analysis import MatchingReport, effective_ranks
from .formats import render_cost
from .model import Matching, SchoolChoiceProblem, completed_problem

FIGURE_DPI = 120


def _figure_backend():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _write_assignments(
    path: Path,
    problem: SchoolChoiceProblem,
    matching: Matching,
    report: MatchingReport,
) -> None:
    ranks = effective_ranks(problem, matching)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["student", "school", "rank", "index", "violated"])
        for student_id, school_id in matching.items():
            writer.writerow(
                [
                    student_id,
                    school_id if school_id is not None else "",
                    ranks[student_id],
                    ranks[student_id] - 1,
                    "yes" if student_id in report.violated_students else "no",
                ]
            )


def _write_summary(path: Path, report: MatchingReport) -> None:
    rows = [
        ("preference_index", report.preference_index),
        ("rank", report.rank),
        ("signature", " ".join(str(c) for c in report.signature)),
        ("cost", render_cost(report.cost)),
        ("violated_students", len(report.violated_students)),
        ("violation_pairs", len(report.violation_pairs)),
        ("pareto", report.pareto),
    ]
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["metric", "value"])
        writer.writerows(rows)


def _draw_rank_distribution(
    path: Path, problem: SchoolChoiceProblem, matching: Matching
) -> None:
    plt = _figure_backend()
    ranks = effective_ranks(problem, matching)
    depth = max(len(s.preferences.tiers) for s in problem.students)
    counts = [0] * (depth + 1)
    for student in problem.students:
        rank = ranks[student.id]
        if matching.school_of(student.id) is None:
            counts[depth] += 1
        else:
            counts[rank - 1] += 1
    labels = [str(r) for r in range(1, depth + 1)] + ["unassigned"]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(range(len(counts)), counts, color="#4878a8")
    ax.set_xticks(range(len(counts)))
    ax.set_xticklabels(labels)
    ax.set_xlabel("effective rank")
    ax.set_ylabel("students")
    ax.set_title("Rank distribution")
    fig.tight_layout()
    fig.savefig(path, dpi=FIGURE_DPI)
    plt.close(fig)


def _draw_school_fill(
    path: Path, problem: SchoolChoiceProblem, matching: Matching
) -> None:
    plt = _figure_backend()
    ids = [school.id for school in problem.schools]
    capacity = [school.capacity for school in problem.schools]
    filled = [len(matching.roster(school_id)) for school_id in ids]
    positions = range(len(ids))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(positions, capacity, color="#d0d0d0", label="capacity")
    ax.bar(positions, filled, color="#4878a8", label="assigned")
    ax.set_xticks(list(positions))
    ax.set_xticklabels(ids, rotation=45, ha="right")
    ax.set_ylabel("seats")
    ax.set_title("School fill")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=FIGURE_DPI)
    plt.close(fig)


def write_report(
    directory: str | Path,
    problem: SchoolChoiceProblem,
    matching: Matching,
    report: MatchingReport,
) -> tuple[Path, ...]:
    """Render tables and figures into the directory; returns written paths."""
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    problem = completed_problem(problem)
    paths = (
        target / "assignments.csv",
        target / "summary.csv",
        target / "rank_distribution.png",
        target / "school_fill.png",
    )
    _write_assignments(paths[0], problem, matching, report)
    _write_summary(paths[1], report)
    _draw_rank_distribution(paths[2], problem, matching)
    _draw_school_fill(paths[3], problem, matching)
    return paths
