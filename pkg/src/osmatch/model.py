"""Domain model: students, schools, preference tiers, priorities, and matchings.

Preferences are ordinal and may contain indifference tiers and omit schools.
Ranks are 1-based: a student's rank for a school is the index of its tier
plus one. Completion appends every unranked school as a single shared worst
tier at rank r+1, after which a profile covers the whole school set and a
student's "unassigned rank" is the number of tiers plus one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import InvalidMatchingError, InvalidProblemError, UnknownIdError

# school id -> 1-based rank; lower is better
RankingFunction = dict[str, int]


@dataclass(frozen=True)
class PreferenceProfile:
    """Ordered indifference tiers over school ids, most preferred first."""

    tiers: tuple[frozenset[str], ...]

    @classmethod
    def from_lists(cls, tiers: Iterable[Iterable[str]]) -> "PreferenceProfile":
        return cls(tuple(frozenset(tier) for tier in tiers))

    def schools_listed(self) -> frozenset[str]:
        out: set[str] = set()
        for tier in self.tiers:
            out.update(tier)
        return frozenset(out)

    def is_complete_for(self, school_ids: Iterable[str]) -> bool:
        return set(school_ids) <= self.schools_listed()

    def ranking(self) -> RankingFunction:
        """Rank of each listed school (tier index + 1)."""
        ranks: RankingFunction = {}
        for index, tier in enumerate(self.tiers):
            for school in tier:
                ranks[school] = index + 1
        return ranks

    def unassigned_rank(self) -> int:
        """Rank charged for non-assignment: one past the worst tier.

        Meaningful on completed profiles, where it is r_max + 1 for this
        student's own r_max (tier counts differ across students).
        """
        return len(self.tiers) + 1


@dataclass(frozen=True)
class PriorityStructure:
    """Ordered priority tiers of student ids; tier 0 is highest priority.

    Students omitted from every tier share an implicit lowest tier below all
    explicit ones.
    """

    tiers: tuple[frozenset[str], ...] = ()

    @classmethod
    def from_lists(cls, tiers: Iterable[Iterable[str]]) -> "PriorityStructure":
        return cls(tuple(frozenset(tier) for tier in tiers))

    def tier_of(self, student_id: str) -> int:
        for index, tier in enumerate(self.tiers):
            if student_id in tier:
                return index
        return len(self.tiers)


@dataclass(frozen=True)
class Student:
    id: str
    preferences: PreferenceProfile


@dataclass(frozen=True)
class School:
    id: str
    capacity: int
    priorities: PriorityStructure = PriorityStructure()


@dataclass(frozen=True)
class SchoolChoiceProblem:
    """An instance: students with preference profiles, schools with seats."""

    students: tuple[Student, ...]
    schools: tuple[School, ...]

    @cached_property
    def student_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.students)

    @cached_property
    def school_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.schools)

    @cached_property
    def total_seats(self) -> int:
        return sum(s.capacity for s in self.schools)

    def student(self, student_id: str) -> Student:
        for s in self.students:
            if s.id == student_id:
                return s
        raise UnknownIdError(f"unknown student {student_id!r}")

    def school(self, school_id: str) -> School:
        for s in self.schools:
            if s.id == school_id:
                return s
        raise UnknownIdError(f"unknown school {school_id!r}")


@dataclass(frozen=True)
class ValidationResult:
    """Outcome of structural validation; ok iff no violations."""

    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_problem(problem: SchoolChoiceProblem) -> ValidationResult:
    """Collect every structural violation instead of stopping at the first."""
    violations: list[str] = []
    if not problem.students:
        violations.append("problem has no students")
    if not problem.schools:
        violations.append("problem has no schools")

    seen_students: set[str] = set()
    for student in problem.students:
        if not student.id:
            violations.append("student with empty id")
        if student.id in seen_students:
            violations.append(f"duplicate student id {student.id!r}")
        seen_students.add(student.id)

    seen_schools: set[str] = set()
    for school in problem.schools:
        if not school.id:
            violations.append("school with empty id")
        if school.id in seen_schools:
            violations.append(f"duplicate school id {school.id!r}")
        seen_schools.add(school.id)
        if school.capacity < 1:
            violations.append(
                f"school {school.id!r} has capacity {school.capacity} (must be >= 1)"
            )

    for student in problem.students:
        listed: set[str] = set()
        for index, tier in enumerate(student.preferences.tiers):
            if not tier:
                violations.append(
                    f"student {student.id!r} has an empty preference tier at position {index}"
                )
            for school_id in tier:
                if school_id not in seen_schools:
                    violations.append(
                        f"student {student.id!r} ranks unknown school {school_id!r}"
                    )
                if school_id in listed:
                    violations.append(
                        f"student {student.id!r} ranks school {school_id!r} more than once"
                    )
                listed.add(school_id)

    for school in problem.schools:
        prioritized: set[str] = set()
        for index, tier in enumerate(school.priorities.tiers):
            if not tier:
                violations.append(
                    f"school {school.id!r} has an empty priority tier at position {index}"
                )
            for student_id in tier:
                if student_id not in seen_students:
                    violations.append(
                        f"school {school.id!r} prioritizes unknown student {student_id!r}"
                    )
                if student_id in prioritized:
                    violations.append(
                        f"school {school.id!r} prioritizes student {student_id!r} more than once"
                    )
                prioritized.add(student_id)

    return ValidationResult(tuple(violations))


def require_valid(problem: SchoolChoiceProblem) -> None:
    result = validate_problem(problem)
    if not result.ok:
        raise InvalidProblemError(result.violations)


def complete_preferences(
    profile: PreferenceProfile, school_ids: Iterable[str]
) -> PreferenceProfile:
    """Append all unranked schools as one shared worst tier (rank r+1).

    Idempotent: completing a complete profile returns it unchanged.
    """
    missing = frozenset(school_ids) - profile.schools_listed()
    if not missing:
        return profile
    return PreferenceProfile(profile.tiers + (missing,))


def completed_problem(problem: SchoolChoiceProblem) -> SchoolChoiceProblem:
    """Complete every student's profile against the problem's school set.

    Returns the same object when nothing needs completing, so repeated
    completion costs one membership scan.
    """
    school_ids = problem.school_ids
    if all(s.preferences.is_complete_for(school_ids) for s in problem.students):
        return problem
    students = tuple(
        Student(s.id, complete_preferences(s.preferences, school_ids))
        for s in problem.students
    )
    return SchoolChoiceProblem(students, problem.schools)


def ranking_of(problem: SchoolChoiceProblem, student_id: str) -> RankingFunction:
    """Completed rank table for one student; requires a completed profile."""
    student = problem.student(student_id)
    if not student.preferences.is_complete_for(problem.school_ids):
        raise InvalidProblemError(
            (f"student {student_id!r} has an incomplete profile; complete it first",)
        )
    return student.preferences.ranking()


def rank_tables(problem: SchoolChoiceProblem) -> dict[str, RankingFunction]:
    """Rank table for every student of a completed problem."""
    return {s.id: ranking_of(problem, s.id) for s in problem.students}


class Matching:
    """Immutable student -> school assignment; None means unassigned.

    Construction validates against a problem: every student appears exactly
    once, every school exists, and no school exceeds its capacity. Equality
    and hashing use only the assignment pairs.
    """

    __slots__ = ("_pairs", "_map")

    def __init__(
        self,
        problem: SchoolChoiceProblem,
        assignments: Mapping[str, str | None],
    ):
        students = set(problem.student_ids)
        extra = set(assignments) - students
        if extra:
            raise InvalidMatchingError(f"unknown students in matching: {sorted(extra)}")
        missing = students - set(assignments)
        if missing:
            raise InvalidMatchingError(
                f"students missing from matching: {sorted(missing)}"
            )
        loads: dict[str, int] = {}
        for student_id, school_id in assignments.items():
            if school_id is None:
                continue
            loads[school_id] = loads.get(school_id, 0) + 1
        for school_id, load in loads.items():
            try:
                school = problem.school(school_id)
            except UnknownIdError:
                raise InvalidMatchingError(
                    f"matching assigns unknown school {school_id!r}"
                ) from None
            if load > school.capacity:
                raise InvalidMatchingError(
                    f"school {school_id!r} over capacity: {load} > {school.capacity}"
                )
        self._map = dict(sorted(assignments.items()))
        self._pairs = tuple(self._map.items())

    def school_of(self, student_id: str) -> str | None:
        if student_id not in self._map:
            raise UnknownIdError(f"unknown student {student_id!r}")
        return self._map[student_id]

    def items(self) -> tuple[tuple[str, str | None], ...]:
        return self._pairs

    def to_dict(self) -> dict[str, str | None]:
        return dict(self._map)

    def students(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self._pairs)

    def sort_key(self) -> tuple[tuple[str, int, str], ...]:
        """Total-order key over matchings; None sorts after every school id."""
        return tuple(
            (s, 1 if sch is None else 0, sch or "") for s, sch in self._pairs
        )

    def roster(self, school_id: str) -> frozenset[str]:
        return frozenset(s for s, sch in self._pairs if sch == school_id)

    def assigned_count(self) -> int:
        return sum(1 for _, sch in self._pairs if sch is not None)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matching):
            return NotImplemented
        return self._pairs == other._pairs

    def __hash__(self) -> int:
        return hash(self._pairs)

    def __repr__(self) -> str:
        inner = ", ".join(
            f"{s}->{sch if sch is not None else 'None'}" for s, sch in self._pairs
        )
        return f"Matching({inner})"


def matched_school(matching: Matching, student_id: str) -> str | None:
    """School assigned to the student, or None when unassigned."""
    return matching.school_of(student_id)


def effective_rank(
    problem: SchoolChoiceProblem, matching: Matching, student_id: str
) -> int:
    """Rank the student experiences: assigned school's rank, or r_max + 1."""
    school_id = matching.school_of(student_id)
    student = problem.student(student_id)
    if school_id is None:
        return student.preferences.unassigned_rank()
    ranks = ranking_of(problem, student_id)
    return ranks[school_id]
