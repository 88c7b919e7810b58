"""Exhaustive reference searches, deliberately independent of the kernel.

Nothing here touches the seat grid, the reductions, or the zero-subgraph
enumerator; matchings are generated straight from the problem and scored
with cost_of_matching. The matching universe is the physical-seat one used
everywhere else: exactly max(0, students - seats) students go unassigned.
Leaving a seat empty on purpose is representable as a Matching but never
minimum-cost (moving any unassigned student into a free seat strictly
lowers their contribution), so restricting the search loses nothing.
"""

from __future__ import annotations

from typing import Iterator

from .errors import GuardExceededError
from .model import Matching, SchoolChoiceProblem, completed_problem
from .transforms import UtilityTransform, cost_of_matching

BRUTE_FORCE_SEAT_GUARD = 8


def iter_feasible_matchings(problem: SchoolChoiceProblem) -> Iterator[Matching]:
    """Yield every matching in the physical-seat universe, school-level.

    Students are processed in problem order and pick either a school with a
    free seat or one of the forced unassigned slots, so each school-level
    matching appears exactly once (no seat-permutation duplicates).
    """
    students = problem.student_ids
    capacities = {school.id: school.capacity for school in problem.schools}
    school_order = problem.school_ids
    unassigned_budget = max(0, len(students) - problem.total_seats)
    assignment: dict[str, str | None] = {}

    def extend(index: int, unassigned_left: int) -> Iterator[Matching]:
        if index == len(students):
            yield Matching(problem, dict(assignment))
            return
        student_id = students[index]
        remaining = len(students) - index - 1
        for school_id in school_order:
            if capacities[school_id] == 0:
                continue
            capacities[school_id] -= 1
            assignment[student_id] = school_id
            # Prune: the students left must still fit seats + unassigned slots.
            if remaining <= sum(capacities.values()) + unassigned_left:
                yield from extend(index + 1, unassigned_left)
            capacities[school_id] += 1
        if unassigned_left > 0:
            assignment[student_id] = None
            yield from extend(index + 1, unassigned_left - 1)
        assignment.pop(student_id, None)

    yield from extend(0, unassigned_budget)


def brute_force_optima(
    problem: SchoolChoiceProblem, transform: UtilityTransform
):
    """Exact argmin set over every feasible matching; guard: <= 8 seats.

    Returns an OptimumSet with exhaustive=True. This is the oracle the
    solver and enumeration modules are tested against, so it shares no code
    with them.
    """
    from .enumeration import OptimumSet

    if problem.total_seats > BRUTE_FORCE_SEAT_GUARD:
        raise GuardExceededError(
            f"brute force guards at {BRUTE_FORCE_SEAT_GUARD} seats, "
            f"got {problem.total_seats}"
        )
    completed = completed_problem(problem)
    best_cost = None
    best: set[Matching] = set()
    for matching in iter_feasible_matchings(completed):
        cost = cost_of_matching(transform, completed, matching)
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best = {matching}
        elif cost == best_cost:
            best.add(matching)
    if best_cost is None:
        raise GuardExceededError("problem admits no feasible matching")
    return OptimumSet(frozenset(best), best_cost, exhaustive=True)
