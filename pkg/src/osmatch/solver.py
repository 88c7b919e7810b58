"""Seat-expanded cost grids and the exact assignment kernel.

The grid gives every physical seat its own column and pads to a square
matrix: dummy rows (missing students) cost zero everywhere, dummy columns
(missing seats) charge a real student f(r_max + 1), one step past their own
worst completed rank, so non-assignment is strictly worse than any listed
school. The kernel is the classic reduce-cover-adjust formulation, generic
over any exact totally ordered cost value; reductions are carried as row and
column duals so a Step-5 adjustment touches O(n) values, and the Step-3
cover comes from a maximum matching of the zero cells by Koenig's
construction. Matched zeros are always singly covered, so the matching
survives every adjustment and the adjustment count stays finite.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

from .errors import FormatError, GuardExceededError, KernelError, TransformError
from .model import (
    Matching,
    SchoolChoiceProblem,
    completed_problem,
    rank_tables,
    require_valid,
)
from .transforms import (
    CostValue,
    RankTally,
    UtilityTransform,
    apply,
    check_strictly_increasing,
    describe_transform,
    resolve_transform,
    zero_cost,
)

MAX_SEATS_ENV = "OSM_MAX_SEATS"
DEFAULT_MAX_SEATS = 512


def max_grid_side() -> int:
    """Kernel size guard; OSM_MAX_SEATS overrides the 512 default."""
    raw = os.environ.get(MAX_SEATS_ENV)
    if raw is None or not raw.strip():
        return DEFAULT_MAX_SEATS
    try:
        return int(raw)
    except ValueError:
        raise FormatError(
            f"{MAX_SEATS_ENV} must be an integer, got {raw!r}"
        ) from None


@dataclass(frozen=True)
class SeatGrid:
    """Square cost matrix over students (rows) and physical seats (columns).

    row_map holds a student id per real row and None per dummy row; col_map
    holds (school id, seat ordinal) per real column and None per dummy
    column. The stored problem is the completed one and the transform has
    its base resolved.
    """

    matrix: tuple[tuple[CostValue, ...], ...]
    row_map: tuple[str | None, ...]
    col_map: tuple[tuple[str, int] | None, ...]
    transform: UtilityTransform
    problem: SchoolChoiceProblem
    zero: CostValue

    @property
    def size(self) -> int:
        return len(self.matrix)


@dataclass(frozen=True)
class SolveTrace:
    """Kernel execution record.

    iterations counts reduce-cover-adjust rounds including the terminal
    optimality pass (so a grid solved by Steps 1-2 alone reports 1).
    final_reduced is the fully reduced matrix; the selected assignment hits
    only zeros in it. cover_lines is the terminal minimum line cover as
    (row indexes, column indexes); with a perfect zero matching that is one
    line per row. truncated_enumeration is set by the mechanism when the
    optimum set was too large to enumerate and the kernel's own assignment
    was kept.
    """

    iterations: int
    final_reduced: tuple[tuple[CostValue, ...], ...]
    cover_lines: tuple[tuple[int, ...], tuple[int, ...]]
    truncated_enumeration: bool = False


def build_seat_grid(
    problem: SchoolChoiceProblem, transform: UtilityTransform
) -> SeatGrid:
    """Expand capacities into seat columns and price every cell exactly."""
    require_valid(problem)
    completed = completed_problem(problem)
    resolved = resolve_transform(transform, completed)

    students = len(completed.students)
    seats = completed.total_seats
    n = max(students, seats)
    guard = max_grid_side()
    if n > guard:
        raise GuardExceededError(
            f"grid side {n} exceeds the size guard {guard} "
            f"(set {MAX_SEATS_ENV} to raise it)"
        )

    ranks = rank_tables(completed)
    # Dummy columns charge f(r_max + 1), so the transform must cover one rank
    # past the deepest profile whenever padding is present.
    deepest = max(len(s.preferences.tiers) for s in completed.students)
    needed_rank = deepest + 1 if seats < students else deepest
    if not check_strictly_increasing(resolved, needed_rank):
        raise TransformError(
            f"transform {describe_transform(resolved)} is not strictly increasing "
            f"and non-negative through rank {needed_rank}"
        )

    col_map: list[tuple[str, int] | None] = []
    for school in completed.schools:
        for ordinal in range(1, school.capacity + 1):
            col_map.append((school.id, ordinal))
    col_map.extend([None] * (n - seats))
    row_map: list[str | None] = list(completed.student_ids)
    row_map.extend([None] * (n - students))

    zero = zero_cost(resolved)
    matrix: list[tuple[CostValue, ...]] = []
    for student_id in completed.student_ids:
        table = ranks[student_id]
        fallback = apply(
            resolved, completed.student(student_id).preferences.unassigned_rank()
        ) if seats < students else None
        row = [
            apply(resolved, table[col[0]]) if col is not None else fallback
            for col in col_map
        ]
        matrix.append(tuple(row))
    for _ in range(n - students):
        matrix.append(tuple([zero] * n))

    return SeatGrid(
        matrix=tuple(matrix),
        row_map=tuple(row_map),
        col_map=tuple(col_map),
        transform=resolved,
        problem=completed,
        zero=zero,
    )


def _unwrap(matrix: tuple[tuple[CostValue, ...], ...]):
    """Swap RankTally entries for their integer encodings before the kernel.

    The encoding is a group and order isomorphism, so the kernel's
    comparisons and reductions are unchanged; it just avoids per-operation
    wrapper objects. Returns (rows, rewrap).
    """
    base: int | None = None
    for row in matrix:
        for entry in row:
            if isinstance(entry, RankTally):
                base = entry.base
                break
        if base is not None:
            break
    if base is None:
        return [list(row) for row in matrix], lambda value: value
    fixed = base
    rows = [
        [entry.enc if isinstance(entry, RankTally) else entry for entry in row]
        for row in matrix
    ]
    return rows, lambda value: RankTally(fixed, value)


def hungarian_solve(grid: SeatGrid) -> tuple[tuple[int, ...], SolveTrace]:
    """Minimum-cost row -> column bijection over the grid.

    Steps 1-2 reduce rows then columns (held as duals u, v). Each round then
    builds a maximum matching on zero cells with its Koenig cover (Step 3),
    tests for n lines (Step 4), and otherwise subtracts the minimum uncovered
    value from uncovered cells and adds it to doubly covered ones (Step 5).
    Returns the assignment and the execution trace.
    """
    n = grid.size
    rows, rewrap = _unwrap(grid.matrix)

    # Step 1: row reduction.
    u = [min(row) for row in rows]
    if min(u) < 0:
        raise KernelError("grid has a negative entry; costs must be non-negative")
    # Step 2: column reduction of the row-reduced matrix.
    v = [min(rows[i][j] - u[i] for i in range(n)) for j in range(n)]

    col_of = [-1] * n
    row_of = [-1] * n
    for i in range(n):
        base = u[i]
        row = rows[i]
        for j in range(n):
            if row_of[j] < 0 and row[j] - base - v[j] == 0:
                col_of[i] = j
                row_of[j] = i
                break
    matched = sum(1 for j in col_of if j >= 0)

    adjustments = 0
    cap = n * n
    while matched < n:
        # One augmentation epoch. The alternating forest grows from every
        # free row; reached rows/columns are exactly the uncovered rows and
        # covered columns of the Koenig cover, so the minimum uncovered
        # entry is min(minv) over unreached columns.
        in_forest_row = [False] * n
        in_forest_col = [False] * n
        witness = [-1] * n  # column -> forest row proving its reduced minimum
        minv: list = [None] * n
        queue = [i for i in range(n) if col_of[i] < 0]
        for i in queue:
            in_forest_row[i] = True
        augment_col = -1
        while augment_col < 0:
            while queue:
                i = queue.pop()
                base = u[i]
                row = rows[i]
                for j in range(n):
                    if not in_forest_col[j]:
                        cur = row[j] - base - v[j]
                        if minv[j] is None or cur < minv[j]:
                            minv[j] = cur
                            witness[j] = i
            grew = False
            for j in range(n):
                if not in_forest_col[j] and minv[j] == 0:
                    in_forest_col[j] = True
                    matched_row = row_of[j]
                    if matched_row < 0:
                        augment_col = j
                        break
                    if not in_forest_row[matched_row]:
                        in_forest_row[matched_row] = True
                        queue.append(matched_row)
                    grew = True
            if augment_col >= 0 or queue or grew:
                continue
            # Step 4 failed (cover has < n lines); Step 5 adjustment.
            delta = None
            for j in range(n):
                if not in_forest_col[j]:
                    if delta is None or minv[j] < delta:
                        delta = minv[j]
            adjustments += 1
            if adjustments > cap:
                raise KernelError(
                    f"adjustment cap exceeded: {adjustments} rounds on a "
                    f"{n}x{n} grid (cap {cap})"
                )
            for i in range(n):
                if in_forest_row[i]:
                    u[i] += delta
            for j in range(n):
                if in_forest_col[j]:
                    v[j] -= delta
                else:
                    minv[j] -= delta
        # Flip the alternating path ending at the free column.
        j = augment_col
        while j >= 0:
            i = witness[j]
            previous = col_of[i]
            col_of[i] = j
            row_of[j] = i
            j = previous
        matched += 1

    final_reduced = tuple(
        tuple(rewrap(rows[i][j] - u[i] - v[j]) for j in range(n)) for i in range(n)
    )
    for i in range(n):
        if not rows[i][col_of[i]] - u[i] - v[col_of[i]] == 0:
            raise KernelError("selected cell is not zero in the reduced matrix")
    trace = SolveTrace(
        iterations=adjustments + 1,
        final_reduced=final_reduced,
        cover_lines=(tuple(range(n)), ()),
    )
    return tuple(col_of), trace


def decode_assignment(grid: SeatGrid, assignment: tuple[int, ...]) -> Matching:
    """Collapse a row -> column bijection to a student -> school matching."""
    mapping: dict[str, str | None] = {}
    for row_index, student_id in enumerate(grid.row_map):
        if student_id is None:
            continue
        column = grid.col_map[assignment[row_index]]
        mapping[student_id] = None if column is None else column[0]
    return Matching(grid.problem, mapping)


def assignment_cost(grid: SeatGrid, assignment: tuple[int, ...]) -> CostValue:
    """Exact total cost of a row -> column bijection on this grid."""
    total = grid.zero
    for row_index, column in enumerate(assignment):
        total = total + grid.matrix[row_index][column]
    return total


def run_mechanism(
    problem: SchoolChoiceProblem,
    transform: UtilityTransform,
    seed: int = 0,
) -> tuple[Matching, SolveTrace]:
    """Full pipeline: complete, price, solve, enumerate optima, pick one.

    When several optima exist the winner is drawn uniformly from the
    enumerated set with the given seed. If the optimum set cannot be
    enumerated within its caps, the kernel's own assignment is kept and the
    trace is flagged truncated_enumeration.
    """
    from .enumeration import optimal_matchings_of_grid, uniform_pick

    grid = build_seat_grid(problem, transform)
    assignment, trace = hungarian_solve(grid)
    matchings, exhaustive = optimal_matchings_of_grid(grid, trace)
    if not exhaustive:
        return decode_assignment(grid, assignment), replace(
            trace, truncated_enumeration=True
        )
    return uniform_pick(matchings, seed), trace
