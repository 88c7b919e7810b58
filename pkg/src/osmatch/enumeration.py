"""All-optima enumeration, rank-minimal listing, and tie-breaking.

Every minimum-cost assignment hits only zero entries of the kernel's final
reduced matrix (complementary slackness), and every perfect matching of that
zero subgraph is minimum-cost, so enumerating optima is enumerating zero
perfect matchings. Seat permutations within a school collapse to one
matching during decoding; the cap applies to decoded matchings.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from random import Random

from .errors import GuardExceededError
from .model import Matching, SchoolChoiceProblem, completed_problem, rank_tables
from .solver import (
    SeatGrid,
    SolveTrace,
    assignment_cost,
    build_seat_grid,
    decode_assignment,
    hungarian_solve,
)
from .transforms import (
    CostValue,
    ExponentialTransform,
    UtilityTransform,
    resolve_transform,
)

DEFAULT_CAP = 10_000
# Search-step budget: keeps pathological zero graphs from stalling the
# mechanism; overruns surface as exhaustive=False, never as wrong answers.
DEFAULT_NODE_BUDGET = 250_000


@dataclass(frozen=True)
class OptimumSet:
    """All minimum-cost matchings (exhaustive=True) or a capped sample."""

    matchings: frozenset[Matching]
    shared_cost: CostValue
    exhaustive: bool


class _Budget:
    __slots__ = ("nodes", "exceeded")

    def __init__(self, nodes: int):
        self.nodes = nodes
        self.exceeded = False

    def spend(self) -> bool:
        if self.nodes <= 0:
            self.exceeded = True
            return False
        self.nodes -= 1
        return True


def _zero_adjacency(grid: SeatGrid, trace: SolveTrace) -> list[tuple[int, ...]]:
    reduced = trace.final_reduced
    n = grid.size
    return [
        tuple(j for j in range(n) if reduced[i][j] == 0) for i in range(n)
    ]


def _kuhn_feasible(
    adjacency: list[tuple[int, ...]],
    start_row: int,
    n: int,
    used_cols: set[int],
) -> bool:
    """Can rows start_row..n-1 be perfectly matched avoiding used_cols?"""
    match_of_col: dict[int, int] = {}

    def try_row(i: int, visited: set[int]) -> bool:
        for j in adjacency[i]:
            if j in used_cols or j in visited:
                continue
            visited.add(j)
            holder = match_of_col.get(j)
            if holder is None or try_row(holder, visited):
                match_of_col[j] = i
                return True
        return False

    for i in range(start_row, n):
        if not try_row(i, set()):
            return False
    return True


def optimal_matchings_of_grid(
    grid: SeatGrid,
    trace: SolveTrace,
    cap: int = DEFAULT_CAP,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> tuple[frozenset[Matching], bool]:
    """Decode every perfect matching of the zero subgraph, deduplicated.

    Returns (matchings, exhaustive). exhaustive is False when more than cap
    distinct matchings exist or the search budget ran out; the returned set
    then holds what was found (at most cap matchings).
    """
    adjacency = _zero_adjacency(grid, trace)
    n = grid.size
    budget = _Budget(node_budget)
    found: set[Matching] = set()
    overflow = False
    used_cols: set[int] = set()
    chosen: list[int] = [0] * n

    def extend(row: int) -> bool:
        """Depth-first over rows; False aborts the whole search."""
        nonlocal overflow
        if not budget.spend():
            return False
        if row == n:
            matching = decode_assignment(grid, tuple(chosen))
            if matching not in found:
                if len(found) >= cap:
                    overflow = True
                    return False
                found.add(matching)
            return True
        for j in adjacency[row]:
            if j in used_cols:
                continue
            used_cols.add(j)
            chosen[row] = j
            # Descend only into subtrees that still admit a perfect matching.
            if _kuhn_feasible(adjacency, row + 1, n, used_cols):
                if not extend(row + 1):
                    used_cols.discard(j)
                    return False
            used_cols.discard(j)
        return True

    completed = extend(0)
    exhaustive = completed and not overflow and not budget.exceeded
    return frozenset(found), exhaustive


def solve_with_optima(
    problem: SchoolChoiceProblem,
    transform: UtilityTransform,
    cap: int = DEFAULT_CAP,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> tuple[OptimumSet, SolveTrace, Matching]:
    """Build the grid, solve it, and enumerate its optimum set.

    Returns (optima, trace, kernel_matching); kernel_matching is always a
    member of the optimum set, which keeps the set non-empty even when
    enumeration is truncated.
    """
    grid = build_seat_grid(problem, transform)
    assignment, trace = hungarian_solve(grid)
    kernel_matching = decode_assignment(grid, assignment)
    matchings, exhaustive = optimal_matchings_of_grid(grid, trace, cap, node_budget)
    all_found = frozenset(matchings | {kernel_matching})
    optima = OptimumSet(
        matchings=all_found,
        shared_cost=assignment_cost(grid, assignment),
        exhaustive=exhaustive,
    )
    return optima, trace, kernel_matching


def enumerate_min_cost(
    problem: SchoolChoiceProblem,
    transform: UtilityTransform,
    cap: int = DEFAULT_CAP,
) -> OptimumSet:
    """Every minimum-total-cost matching for the problem under the transform."""
    optima, _, _ = solve_with_optima(problem, transform, cap)
    return optima


def enumerate_rank_minimal(problem: SchoolChoiceProblem) -> frozenset[Matching]:
    """All feasible matchings whose rank equals the minimum achievable rank.

    Lists matchings in increasing exponential cost (auto base, so one rank-j
    assignment outweighs everything below) and cuts at the first rank change;
    the prefix is cross-checked against direct filtering by minimum rank over
    the same physical-seat universe. Guard: at most 10 students.
    """
    from .exhaustive import iter_feasible_matchings

    if len(problem.students) > 10:
        raise GuardExceededError(
            f"rank-minimal listing guards at 10 students, got {len(problem.students)}"
        )
    completed = completed_problem(problem)
    transform = resolve_transform(
        ExponentialTransform(None, scalar=True), completed
    )
    tables = rank_tables(completed)
    fallback = {
        s.id: s.preferences.unassigned_rank() for s in completed.students
    }

    def rank_of(matching: Matching) -> int:
        worst = 0
        for student_id, school_id in matching.items():
            rank = (
                fallback[student_id]
                if school_id is None
                else tables[student_id][school_id]
            )
            if rank > worst:
                worst = rank
        return worst

    def cost_of(matching: Matching) -> int:
        base = transform.base
        total = 0
        for student_id, school_id in matching.items():
            rank = (
                fallback[student_id]
                if school_id is None
                else tables[student_id][school_id]
            )
            total += base**rank
        return total

    everything = sorted(
        iter_feasible_matchings(completed), key=lambda m: (cost_of(m), m.items())
    )
    first_rank = rank_of(everything[0])
    listed: set[Matching] = set()
    for matching in everything:
        if rank_of(matching) != first_rank:
            break
        listed.add(matching)
    filtered = {m for m in everything if rank_of(m) == first_rank}
    if listed != filtered:
        raise AssertionError(
            "cost-ordered prefix disagrees with direct rank filtering"
        )
    return frozenset(listed)


class TieBreakCriterion(Enum):
    """Orderings applied, in sequence, to shrink a set of optima."""

    MIN_VARIANCE = "variance"
    FEWEST_VIOLATED_STUDENTS = "violations"


@dataclass(frozen=True)
class TieBreakPolicy:
    """Criteria applied in order, then a seeded uniform pick."""

    criteria: tuple[TieBreakCriterion, ...]
    seed: int = 0

    def __post_init__(self):
        if len(set(self.criteria)) != len(self.criteria):
            raise ValueError("tie-break criteria must not repeat")


def uniform_pick(matchings: frozenset[Matching] | set[Matching], seed: int) -> Matching:
    """Seeded uniform draw over a canonical (sorted) listing of matchings."""
    ordered = sorted(matchings, key=Matching.sort_key)
    if len(ordered) == 1:
        return ordered[0]
    return ordered[Random(seed).randrange(len(ordered))]


def matching_index_variance(
    problem: SchoolChoiceProblem, matching: Matching
) -> Fraction:
    """Population variance of per-student preference indexes (rank - 1).

    Unassigned students contribute (r_max + 1) - 1 like everywhere else.
    """
    problem = completed_problem(problem)
    tables = rank_tables(problem)
    indexes: list[int] = []
    for student in problem.students:
        school_id = matching.school_of(student.id)
        rank = (
            student.preferences.unassigned_rank()
            if school_id is None
            else tables[student.id][school_id]
        )
        indexes.append(rank - 1)
    count = len(indexes)
    mean = Fraction(sum(indexes), count)
    return sum((Fraction(x) - mean) ** 2 for x in indexes) / count


def tiebreak_select(
    problem: SchoolChoiceProblem,
    optima: OptimumSet,
    policy: TieBreakPolicy,
) -> Matching:
    """Filter the optima by each criterion in turn, then pick with the seed."""
    from .analysis import violated_students

    candidates = sorted(optima.matchings, key=Matching.sort_key)
    for criterion in policy.criteria:
        if len(candidates) == 1:
            break
        if criterion is TieBreakCriterion.MIN_VARIANCE:
            keys = {m: matching_index_variance(problem, m) for m in candidates}
        elif criterion is TieBreakCriterion.FEWEST_VIOLATED_STUDENTS:
            keys = {m: len(violated_students(problem, m)) for m in candidates}
        else:  # pragma: no cover - enum is closed
            raise ValueError(f"unknown criterion {criterion}")
        best = min(keys.values())
        candidates = [m for m in candidates if keys[m] == best]
    return uniform_pick(set(candidates), policy.seed)
