"""Shared instances and helpers for the test suite.

Every fixed instance below is hand-checked: the matrices, matchings, costs,
and counts the tests expect were derived by hand from the stated preferences
before any test ran. Random instances come from the package's own seeded
generator so failures replay exactly.
"""

from __future__ import annotations

from random import Random

from osmatch.generate import InstanceSpec, generate_instance
from osmatch.model import (
    Matching,
    PreferenceProfile,
    PriorityStructure,
    School,
    SchoolChoiceProblem,
    Student,
)
from osmatch.transforms import LinearTransform

# f1(r) = r - 1 prices a first choice at zero; IDENTITY prices rank r at r.
F1 = LinearTransform(1, -1)
IDENTITY = LinearTransform(1, 0)


def strict(*order: str) -> PreferenceProfile:
    """Strict preference profile, best first."""
    return PreferenceProfile.from_lists([[s] for s in order])


def problem_of(
    prefs: dict[str, PreferenceProfile],
    capacities: dict[str, int],
    priorities: dict[str, list[list[str]]] | None = None,
) -> SchoolChoiceProblem:
    priorities = priorities or {}
    students = tuple(Student(sid, profile) for sid, profile in prefs.items())
    schools = tuple(
        School(sid, cap, PriorityStructure.from_lists(priorities.get(sid, [])))
        for sid, cap in capacities.items()
    )
    return SchoolChoiceProblem(students, schools)


def matching_of(problem: SchoolChoiceProblem, **assigned: str | None) -> Matching:
    """Matching from keyword pairs; students left out are unassigned."""
    mapping: dict[str, str | None] = {s: None for s in problem.student_ids}
    mapping.update(assigned)
    return Matching(problem, mapping)


def unique_optimum_problem() -> SchoolChoiceProblem:
    """Three students, three single seats, exactly one minimum-cost matching.

    Under f1 the cost matrix is [[0,1,2],[2,1,0],[2,0,1]] and the unique
    optimum i1->s1, i2->s3, i3->s2 gives everyone a first choice (cost 0).
    """
    return problem_of(
        {
            "i1": strict("s1", "s2", "s3"),
            "i2": strict("s3", "s2", "s1"),
            "i3": strict("s2", "s3", "s1"),
        },
        {"s1": 1, "s2": 1, "s3": 1},
    )


def three_optima_problem() -> SchoolChoiceProblem:
    """Four students, four single seats, exactly three f1-minimal matchings."""
    return problem_of(
        {
            "i1": strict("s1", "s2", "s3", "s4"),
            "i2": strict("s4", "s2", "s1", "s3"),
            "i3": strict("s3", "s1", "s4", "s2"),
            "i4": strict("s3", "s4", "s2", "s1"),
        },
        {"s1": 1, "s2": 1, "s3": 1, "s4": 1},
    )


def three_optima_matchings(
    problem: SchoolChoiceProblem,
) -> tuple[Matching, Matching, Matching]:
    """The three cost-2 optima: index vectors (0,1,0,1), (1,0,1,0), (0,0,0,2)."""
    m1 = matching_of(problem, i1="s1", i2="s2", i3="s3", i4="s4")
    m2 = matching_of(problem, i1="s2", i2="s4", i3="s1", i4="s3")
    m3 = matching_of(problem, i1="s1", i2="s4", i3="s3", i4="s2")
    return m1, m2, m3


def dominated_pair_problem() -> SchoolChoiceProblem:
    """Three students where two rank-2 matchings exist and one dominates.

    cheap = i1->s3, i2->s2, i3->s1 has ranks (1,1,2), f1 cost 1; dear =
    i1->s2, i2->s3, i3->s1 has ranks (2,2,2), f1 cost 3. cheap improves i1
    and i2 and leaves i3 in place, so it is dear's only dominator.
    """
    return problem_of(
        {
            "i1": strict("s3", "s2", "s1"),
            "i2": strict("s2", "s3", "s1"),
            "i3": strict("s2", "s1", "s3"),
        },
        {"s1": 1, "s2": 1, "s3": 1},
    )


def dominated_pair_matchings(
    problem: SchoolChoiceProblem,
) -> tuple[Matching, Matching]:
    cheap = matching_of(problem, i1="s3", i2="s2", i3="s1")
    dear = matching_of(problem, i1="s2", i2="s3", i3="s1")
    return cheap, dear


def rank_tension_problem() -> SchoolChoiceProblem:
    """Five students whose rank-maximal matching is not rank-minimal.

    top_heavy gives four first choices and one third choice (signature
    (4,0,1,0,0), rank 3) and is the unique signature maximum; one_deep gives
    four first choices at the price of one fifth choice; balanced keeps every
    student within rank 2, witnessing that the minimum rank is 2.
    """
    return problem_of(
        {
            "i1": strict("s1", "s2", "s3", "s4", "s5"),
            "i2": strict("s2", "s3", "s4", "s5", "s1"),
            "i3": strict("s3", "s4", "s5", "s1", "s2"),
            "i4": strict("s4", "s5", "s1", "s2", "s3"),
            "i5": strict("s1", "s2", "s5", "s3", "s4"),
        },
        {"s1": 1, "s2": 1, "s3": 1, "s4": 1, "s5": 1},
    )


def rank_tension_matchings(
    problem: SchoolChoiceProblem,
) -> tuple[Matching, Matching, Matching]:
    top_heavy = matching_of(problem, i1="s1", i2="s2", i3="s3", i4="s4", i5="s5")
    one_deep = matching_of(problem, i1="s5", i2="s2", i3="s3", i4="s4", i5="s1")
    balanced = matching_of(problem, i1="s2", i2="s3", i3="s4", i4="s5", i5="s1")
    return top_heavy, one_deep, balanced


def efficient_never_chosen_problem() -> SchoolChoiceProblem:
    """Three students with an efficient matching no transform ever selects.

    stuck = i1->s1, i2->s2, i3->s3 has ranks (1,3,1); swapped = i1->s1,
    i2->s3, i3->s2 has ranks (1,1,2). Any strictly increasing f prices
    f(3) > f(2), so stuck always costs strictly more than swapped, yet no
    matching weakly improves on stuck for all three students at once.
    """
    return problem_of(
        {
            "i1": strict("s1", "s2", "s3"),
            "i2": strict("s3", "s1", "s2"),
            "i3": strict("s3", "s2", "s1"),
        },
        {"s1": 1, "s2": 1, "s3": 1},
    )


def efficient_never_chosen_matchings(
    problem: SchoolChoiceProblem,
) -> tuple[Matching, Matching]:
    stuck = matching_of(problem, i1="s1", i2="s2", i3="s3")
    swapped = matching_of(problem, i1="s1", i2="s3", i3="s2")
    return stuck, swapped


def bounded_instance(
    seed: int,
    max_students: int = 8,
    max_seats: int = 7,
    tie_prob: float = 0.3,
    incomplete_prob: float = 0.3,
) -> SchoolChoiceProblem:
    """Seeded random instance whose total seat count respects max_seats."""
    rng = Random(seed)
    while True:
        schools = rng.randint(1, max_seats)
        cap_max = max(1, min(3, max_seats // schools))
        spec = InstanceSpec(
            students=rng.randint(1, max_students),
            schools=schools,
            cap_min=1,
            cap_max=cap_max,
            tie_prob=rng.uniform(0, tie_prob),
            incomplete_prob=rng.uniform(0, incomplete_prob),
            skew=rng.uniform(0, 1.0),
            seed=rng.randrange(2**32),
        )
        problem = generate_instance(spec)
        if problem.total_seats <= max_seats:
            return problem


_ACCEPTANCE_LINES: list[str] = []


def record_acceptance_line(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo one line per acceptance criterion after the test summary."""
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
