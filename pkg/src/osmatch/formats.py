"""File formats: instance documents, matching documents, CSV import, cost strings.

The instance document is JSON with two top-level keys:

    {
      "students": [{"id": "i1", "preferences": [["s1"], ["s2", "s3"]]}],
      "schools":  [{"id": "s1", "capacity": 2, "priorities": [["i1"]]}]
    }

Inner preference/priority lists are tiers; a tier longer than one encodes
indifference. Parse errors carry path and line positions; schema errors carry
a JSON-path-style location. serialize/parse round-trip exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .errors import FormatError, InvalidMatchingError
from .model import (
    Matching,
    PreferenceProfile,
    PriorityStructure,
    School,
    SchoolChoiceProblem,
    Student,
)
from .transforms import CostValue, RankTally


def _expect(value, kind, where: str):
    if not isinstance(value, kind):
        raise FormatError(f"{where}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _tier_list(value, where: str, member: str) -> tuple[frozenset[str], ...]:
    tiers = []
    for t, tier in enumerate(_expect(value, list, where)):
        _expect(tier, list, f"{where}[{t}]")
        for k, item in enumerate(tier):
            _expect(item, str, f"{where}[{t}][{k}]")
        tiers.append(frozenset(tier))
        if len(tiers[-1]) != len(tier):
            raise FormatError(f"{where}[{t}]: duplicate {member} within one tier")
    return tuple(tiers)


def parse_problem(text: str, source: str = "<string>") -> SchoolChoiceProblem:
    """Parse an instance document; structural errors only, no validation."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    _expect(doc, dict, source)
    for key in ("students", "schools"):
        if key not in doc:
            raise FormatError(f"{source}: missing top-level key {key!r}")
    students = []
    for k, entry in enumerate(_expect(doc["students"], list, "students")):
        where = f"students[{k}]"
        _expect(entry, dict, where)
        if "id" not in entry or "preferences" not in entry:
            raise FormatError(f"{where}: needs id and preferences")
        students.append(
            Student(
                _expect(entry["id"], str, f"{where}.id"),
                PreferenceProfile(
                    _tier_list(entry["preferences"], f"{where}.preferences", "school")
                ),
            )
        )
    schools = []
    for k, entry in enumerate(_expect(doc["schools"], list, "schools")):
        where = f"schools[{k}]"
        _expect(entry, dict, where)
        if "id" not in entry or "capacity" not in entry:
            raise FormatError(f"{where}: needs id and capacity")
        capacity = entry["capacity"]
        if isinstance(capacity, bool) or not isinstance(capacity, int):
            raise FormatError(f"{where}.capacity: expected integer")
        schools.append(
            School(
                _expect(entry["id"], str, f"{where}.id"),
                capacity,
                PriorityStructure(
                    _tier_list(
                        entry.get("priorities", []), f"{where}.priorities", "student"
                    )
                ),
            )
        )
    return SchoolChoiceProblem(tuple(students), tuple(schools))


def load_problem(path: str | Path) -> SchoolChoiceProblem:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from exc
    return parse_problem(text, source=str(path))


def serialize_problem(problem: SchoolChoiceProblem) -> str:
    """Canonical instance document; parse(serialize(p)) == p, byte-stable."""
    doc = {
        "students": [
            {
                "id": s.id,
                "preferences": [sorted(tier) for tier in s.preferences.tiers],
            }
            for s in problem.students
        ],
        "schools": [
            {
                "id": s.id,
                "capacity": s.capacity,
                "priorities": [sorted(tier) for tier in s.priorities.tiers],
            }
            for s in problem.schools
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_matching(
    problem: SchoolChoiceProblem, text: str, source: str = "<string>"
) -> Matching:
    """Read a matching from a bare {student: school|null} map or a solve document.

    Students absent from the map are unassigned; that keeps solve output
    directly re-feedable to analyze.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    _expect(doc, dict, source)
    if "matching" in doc:
        doc = _expect(doc["matching"], dict, f"{source}: matching")
    assignment: dict[str, str | None] = {s: None for s in problem.student_ids}
    for student_id, school_id in doc.items():
        if student_id not in assignment:
            raise InvalidMatchingError(f"{source}: unknown student {student_id!r}")
        if school_id is not None and not isinstance(school_id, str):
            raise FormatError(f"{source}: matching[{student_id!r}] must be a school id or null")
        assignment[student_id] = school_id
    return Matching(problem, assignment)


def load_matching(problem: SchoolChoiceProblem, path: str | Path) -> Matching:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from exc
    return parse_matching(problem, text, source=str(path))


def parse_students_csv(
    text: str, default_capacity: int = 1, source: str = "<string>"
) -> SchoolChoiceProblem:
    """Import district-style ranked lists: student id, choice1..choiceK per row.

    Ranked cells become strict singleton tiers; empty cells end the list.
    Schools are the union of all choices, every one at default_capacity, with
    no priorities.
    """
    if default_capacity < 1:
        raise FormatError(f"{source}: default capacity must be >= 1")
    rows = list(csv.reader(text.splitlines()))
    if rows and rows[0] and rows[0][0].strip().lower() in ("student", "student_id", "id"):
        rows = rows[1:]
    students = []
    school_ids: dict[str, None] = {}
    for number, row in enumerate(rows, start=1):
        cells = [cell.strip() for cell in row]
        if not any(cells):
            continue
        if not cells[0]:
            raise FormatError(f"{source}: row {number}: empty student id")
        choices = []
        for cell in cells[1:]:
            if not cell:
                break
            choices.append(cell)
            school_ids.setdefault(cell, None)
        if not choices:
            raise FormatError(f"{source}: row {number}: no choices listed")
        students.append(
            Student(cells[0], PreferenceProfile.from_lists([[c] for c in choices]))
        )
    schools = tuple(School(s, default_capacity) for s in sorted(school_ids))
    return SchoolChoiceProblem(tuple(students), schools)


def load_students_csv(
    path: str | Path, default_capacity: int = 1
) -> SchoolChoiceProblem:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from exc
    return parse_students_csv(text, default_capacity, source=str(path))


def render_cost(cost: CostValue) -> str:
    """Exact decimal string for any cost realization; never loses precision.

    Tallies render through their scalar value; rationals as "p/q" (or a bare
    integer when the denominator is 1, which is how Fraction prints itself).
    """
    if isinstance(cost, RankTally):
        return str(cost.scalar())
    return str(cost)
