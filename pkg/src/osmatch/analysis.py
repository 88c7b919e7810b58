"""Matching quality metrics, efficiency certification, and priority audits.

Every public function completes the preference profile first (completion is
idempotent), so partial profiles are fine. Unassigned students count at rank
r_max + 1, each student's own one-past-worst completed rank.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import GuardExceededError
from .model import (
    Matching,
    SchoolChoiceProblem,
    completed_problem,
    rank_tables,
)
from .transforms import CostValue, UtilityTransform, cost_of_matching

PARETO_STUDENT_GUARD = 10


def effective_ranks(
    problem: SchoolChoiceProblem, matching: Matching
) -> dict[str, int]:
    """Effective rank per student; expects a completed problem."""
    tables = rank_tables(problem)
    out: dict[str, int] = {}
    for student in problem.students:
        school_id = matching.school_of(student.id)
        if school_id is None:
            out[student.id] = student.preferences.unassigned_rank()
        else:
            out[student.id] = tables[student.id][school_id]
    return out


def preference_index(problem: SchoolChoiceProblem, matching: Matching) -> int:
    """Sum over students of (effective rank - 1); 0 means everyone got a top pick."""
    problem = completed_problem(problem)
    return sum(rank - 1 for rank in effective_ranks(problem, matching).values())


def matching_rank(problem: SchoolChoiceProblem, matching: Matching) -> int:
    """Worst effective rank any student experiences."""
    problem = completed_problem(problem)
    return max(effective_ranks(problem, matching).values())


def rank_signature(problem: SchoolChoiceProblem, matching: Matching) -> tuple[int, ...]:
    """Counts of assigned students at rank 1, 2, ...; sums to assigned count.

    The signature length is the deepest completed profile, so signatures of
    different matchings of one problem are comparable position by position.
    """
    problem = completed_problem(problem)
    length = max(len(s.preferences.tiers) for s in problem.students)
    counts = [0] * length
    tables = rank_tables(problem)
    for student_id, school_id in matching.items():
        if school_id is not None:
            counts[tables[student_id][school_id] - 1] += 1
    return tuple(counts)


def brute_force_rank_maximal(problem: SchoolChoiceProblem) -> frozenset[Matching]:
    """All signature-maximal matchings (lexicographic from rank 1, more is better).

    Guard: at most 10 students.
    """
    from .exhaustive import iter_feasible_matchings

    if len(problem.students) > PARETO_STUDENT_GUARD:
        raise GuardExceededError(
            f"rank-maximal search guards at {PARETO_STUDENT_GUARD} students, "
            f"got {len(problem.students)}"
        )
    problem = completed_problem(problem)
    best_signature: tuple[int, ...] | None = None
    best: set[Matching] = set()
    for matching in iter_feasible_matchings(problem):
        signature = rank_signature(problem, matching)
        if best_signature is None or signature > best_signature:
            best_signature = signature
            best = {matching}
        elif signature == best_signature:
            best.add(matching)
    return frozenset(best)


def is_rank_minimal(problem: SchoolChoiceProblem, matching: Matching) -> bool:
    """True iff no feasible matching has a strictly smaller rank. Guard: 10 students."""
    from .exhaustive import iter_feasible_matchings

    if len(problem.students) > PARETO_STUDENT_GUARD:
        raise GuardExceededError(
            f"rank-minimal check guards at {PARETO_STUDENT_GUARD} students, "
            f"got {len(problem.students)}"
        )
    problem = completed_problem(problem)
    own = matching_rank(problem, matching)
    return all(
        matching_rank(problem, other) >= own
        for other in iter_feasible_matchings(problem)
    )


def priority_violations(
    problem: SchoolChoiceProblem, matching: Matching
) -> frozenset[tuple[str, str, str]]:
    """Justified-envy triples (violated student, assignee, school).

    (i, j, s) is recorded when i strictly prefers s to i's assignment, j is
    assigned to s, and i sits in a strictly higher priority tier at s than j.
    Students omitted from a school's priority tiers share the implicit lowest
    tier.
    """
    problem = completed_problem(problem)
    ranks = effective_ranks(problem, matching)
    tables = rank_tables(problem)
    out: set[tuple[str, str, str]] = set()
    for school in problem.schools:
        roster = matching.roster(school.id)
        if not roster:
            continue
        for student in problem.students:
            if student.id in roster:
                continue
            if tables[student.id][school.id] >= ranks[student.id]:
                continue
            tier = school.priorities.tier_of(student.id)
            for holder in roster:
                if tier < school.priorities.tier_of(holder):
                    out.add((student.id, holder, school.id))
    return frozenset(out)


def violated_students(
    problem: SchoolChoiceProblem, matching: Matching
) -> frozenset[str]:
    """Distinct students appearing on the violated side of any triple."""
    return frozenset(i for i, _, _ in priority_violations(problem, matching))


def pareto_dominator(
    problem: SchoolChoiceProblem, matching: Matching
) -> Matching | None:
    """A matching that weakly improves everyone and strictly improves someone.

    Returns None iff the matching is Pareto efficient. The search is complete
    without enumerating the whole universe: a dominator exists iff for some
    focal student there is a capacity-respecting assignment giving the focal
    student a strictly better school and everyone else a weakly-better-or-
    equal placement, which is a bipartite feasibility question per focal
    student. Guard: at most 10 students.
    """
    if len(problem.students) > PARETO_STUDENT_GUARD:
        raise GuardExceededError(
            f"Pareto certification guards at {PARETO_STUDENT_GUARD} students, "
            f"got {len(problem.students)}"
        )
    witness_problem = problem
    problem = completed_problem(problem)
    ranks = effective_ranks(problem, matching)
    tables = rank_tables(problem)

    seat_slots: list[str] = []
    for school in problem.schools:
        seat_slots.extend([school.id] * school.capacity)

    def weak_options(student_id: str) -> list[int]:
        limit = ranks[student_id]
        table = tables[student_id]
        return [
            slot for slot, school_id in enumerate(seat_slots)
            if table[school_id] <= limit
        ]

    def strict_options(student_id: str) -> list[int]:
        limit = ranks[student_id]
        table = tables[student_id]
        return [
            slot for slot, school_id in enumerate(seat_slots)
            if table[school_id] < limit
        ]

    # Students currently unassigned may always stay unassigned (weak), so
    # only assigned students plus the focal one constrain feasibility.
    assigned = [s for s, school in matching.items() if school is not None]

    for focal in problem.student_ids:
        focal_strict = strict_options(focal)
        if not focal_strict:
            continue
        need = [focal] + [s for s in assigned if s != focal]
        allowed = {focal: focal_strict}
        for student_id in need[1:]:
            allowed[student_id] = weak_options(student_id)

        slot_holder: dict[int, str] = {}

        def place(student_id: str, visited: set[int]) -> bool:
            for slot in allowed[student_id]:
                if slot in visited:
                    continue
                visited.add(slot)
                current = slot_holder.get(slot)
                if current is None or place(current, visited):
                    slot_holder[slot] = student_id
                    return True
            return False

        if all(place(student_id, set()) for student_id in need):
            witness: dict[str, str | None] = {
                s: None for s in problem.student_ids
            }
            for slot, student_id in slot_holder.items():
                witness[student_id] = seat_slots[slot]
            return Matching(witness_problem, witness)
    return None


def is_pareto_efficient(problem: SchoolChoiceProblem, matching: Matching) -> bool:
    """True iff no feasible matching Pareto-dominates this one."""
    return pareto_dominator(problem, matching) is None


@dataclass(frozen=True)
class MatchingReport:
    """Everything the analyze path reports about one matching.

    pareto is "efficient", "dominated", or "skipped" (size guard exceeded);
    dominated_by carries the witness when dominated.
    """

    preference_index: int
    rank: int
    signature: tuple[int, ...]
    cost: CostValue
    violated_students: frozenset[str]
    violation_pairs: frozenset[tuple[str, str, str]]
    pareto: str
    dominated_by: Matching | None


def build_report(
    problem: SchoolChoiceProblem,
    matching: Matching,
    transform: UtilityTransform,
) -> MatchingReport:
    """Compute every metric; certification degrades to "skipped" on guard."""
    problem = completed_problem(problem)
    pairs = priority_violations(problem, matching)
    try:
        dominator = pareto_dominator(problem, matching)
        pareto = "efficient" if dominator is None else "dominated"
    except GuardExceededError:
        dominator = None
        pareto = "skipped"
    return MatchingReport(
        preference_index=preference_index(problem, matching),
        rank=matching_rank(problem, matching),
        signature=rank_signature(problem, matching),
        cost=cost_of_matching(transform, problem, matching),
        violated_students=frozenset(i for i, _, _ in pairs),
        violation_pairs=pairs,
        pareto=pareto,
        dominated_by=dominator,
    )
