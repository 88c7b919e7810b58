"""Strategic-action audits: misreport search and homogeneous-population analysis.

Expected outcomes assume the selected optimum is drawn uniformly from the
full optimum set, so they are exact rationals computed as plain means; no
random draw (and hence no seed) is involved. Costs are always scored against
the student's true preferences, never the reported ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial

from .enumeration import DEFAULT_CAP, solve_with_optima
from .errors import (
    EnumerationIncompleteError,
    GuardExceededError,
    InvalidProblemError,
)
from .model import (
    Matching,
    PreferenceProfile,
    RankingFunction,
    School,
    SchoolChoiceProblem,
    Student,
    completed_problem,
    ranking_of,
)
from .transforms import (
    CostValue,
    ExponentialTransform,
    UtilityTransform,
    apply,
    resolve_transform,
    scalar_value,
)

SCHOOL_PERMUTATION_GUARD = 7


@dataclass(frozen=True)
class StrategyReport:
    """Outcome of an exhaustive misreport audit for one student.

    best_misreport is None when no strict report beats truthfulness; in that
    case misreport_expected_cost is None and receivable_after repeats the
    truthful receivable set. Receivable sets may contain None when some
    optimum leaves the student unassigned.
    """

    student: str
    truthful_expected_cost: Fraction
    best_misreport: PreferenceProfile | None
    misreport_expected_cost: Fraction | None
    receivable_truthful: frozenset[str | None]
    receivable_after: frozenset[str | None]


@dataclass(frozen=True)
class DifferenceProfile:
    """Per-school values f(rank by focal) - f(rank by population).

    Under a homogeneous population the mechanism can only hand the focal
    student a school minimizing this value, so argmin() is the receivable
    set.
    """

    values: tuple[tuple[str, CostValue], ...]

    def value_of(self, school_id: str) -> CostValue:
        for school, value in self.values:
            if school == school_id:
                return value
        raise KeyError(school_id)

    def argmin(self) -> frozenset[str]:
        best = min(value for _, value in self.values)
        return frozenset(s for s, value in self.values if value == best)


def _strict_ranking(ranking: RankingFunction, label: str) -> None:
    expected = set(range(1, len(ranking) + 1))
    if set(ranking.values()) != expected:
        raise InvalidProblemError(
            (f"{label} ranking must assign ranks 1..{len(ranking)} exactly once",)
        )


def difference_profile(
    focal_ranking: RankingFunction,
    population_ranking: RankingFunction,
    transform: UtilityTransform,
) -> DifferenceProfile:
    """The profile driving receivability under a homogeneous population.

    Both rankings must be strict totals over the same school set. An
    unresolved exponential transform is pinned to base m + 1 for m schools,
    matching what the solver would pick for the induced m-by-m instance.
    """
    if set(focal_ranking) != set(population_ranking):
        raise InvalidProblemError(
            ("focal and population rankings cover different school sets",)
        )
    _strict_ranking(focal_ranking, "focal")
    _strict_ranking(population_ranking, "population")
    if isinstance(transform, ExponentialTransform) and transform.base is None:
        transform = ExponentialTransform(len(focal_ranking) + 1, transform.scalar)
    values = tuple(
        (school, apply(transform, focal_ranking[school])
         - apply(transform, population_ranking[school]))
        for school in sorted(focal_ranking)
    )
    return DifferenceProfile(values)


def homogeneous_receivable_set(
    focal_ranking: RankingFunction,
    population_ranking: RankingFunction,
    transform: UtilityTransform,
) -> frozenset[str]:
    """Schools the focal student can ever receive against a homogeneous field."""
    return difference_profile(focal_ranking, population_ranking, transform).argmin()


def build_homogeneous_problem(
    focal_order: tuple[str, ...] | list[str],
    population_order: tuple[str, ...] | list[str],
) -> SchoolChoiceProblem:
    """One focal student i1 plus m - 1 clones over m single-seat schools.

    Orders are strict school-id sequences, best first, over the same set.
    """
    if set(focal_order) != set(population_order) or len(focal_order) != len(
        set(focal_order)
    ):
        raise InvalidProblemError(
            ("focal and population orders must be permutations of one school set",)
        )
    focal = PreferenceProfile.from_lists([[s] for s in focal_order])
    population = PreferenceProfile.from_lists([[s] for s in population_order])
    m = len(focal_order)
    students = tuple(
        Student(f"i{k}", focal if k == 1 else population) for k in range(1, m + 1)
    )
    schools = tuple(School(s, 1) for s in sorted(focal_order))
    return SchoolChoiceProblem(students, schools)


def _true_rank_cost(
    transform: UtilityTransform,
    true_table: RankingFunction,
    unassigned_rank: int,
    matching: Matching,
    student_id: str,
) -> int | Fraction:
    school = matching.school_of(student_id)
    rank = unassigned_rank if school is None else true_table[school]
    return scalar_value(apply(transform, rank))


def expected_outcome(
    problem: SchoolChoiceProblem,
    student_id: str,
    transform: UtilityTransform,
    cap: int = DEFAULT_CAP,
) -> Fraction:
    """Mean true cost for the student over the uniform optimum distribution.

    Raises EnumerationIncompleteError when the optimum set cannot be fully
    enumerated under the cap, since a truncated mean would be meaningless.
    """
    completed = completed_problem(problem)
    resolved = resolve_transform(transform, completed)
    optima, _, _ = solve_with_optima(completed, resolved, cap)
    if not optima.exhaustive:
        raise EnumerationIncompleteError(
            f"optimum set truncated at cap {cap}; expectation undefined"
        )
    table = ranking_of(completed, student_id)
    beyond = completed.student(student_id).preferences.unassigned_rank()
    total = sum(
        _true_rank_cost(resolved, table, beyond, m, student_id)
        for m in optima.matchings
    )
    return Fraction(total, len(optima.matchings))


def _with_report(
    problem: SchoolChoiceProblem, student_id: str, report: PreferenceProfile
) -> SchoolChoiceProblem:
    students = tuple(
        Student(s.id, report) if s.id == student_id else s for s in problem.students
    )
    return SchoolChoiceProblem(students, problem.schools)


def exhaustive_best_response(
    problem: SchoolChoiceProblem,
    student_id: str,
    transform: UtilityTransform,
    cap_schools: int = SCHOOL_PERMUTATION_GUARD,
    cap: int = DEFAULT_CAP,
) -> StrategyReport:
    """Try every strict report for one student; keep the best strict gain.

    All m! strict orders over the full school set are evaluated in
    lexicographic order of the problem's school listing; each induced optimum
    set is scored against the student's true preferences. A misreport is
    returned only when its expected true cost strictly beats truthfulness;
    ties between equally good misreports go to the earliest order tried.
    Guard: at most cap_schools schools (default 7, i.e. 5040 reports).
    """
    if len(problem.schools) > cap_schools:
        raise GuardExceededError(
            f"misreport search guards at {cap_schools} schools, "
            f"got {len(problem.schools)}"
        )
    truth = completed_problem(problem)
    resolved = resolve_transform(transform, truth)
    true_table = ranking_of(truth, student_id)
    beyond = truth.student(student_id).preferences.unassigned_rank()

    def score(candidate: SchoolChoiceProblem) -> tuple[Fraction, frozenset[str | None]]:
        optima, _, _ = solve_with_optima(candidate, resolved, cap)
        if not optima.exhaustive:
            raise EnumerationIncompleteError(
                f"optimum set truncated at cap {cap} during misreport search"
            )
        total = sum(
            _true_rank_cost(resolved, true_table, beyond, m, student_id)
            for m in optima.matchings
        )
        mean = Fraction(total, len(optima.matchings))
        received = frozenset(m.school_of(student_id) for m in optima.matchings)
        return mean, received

    truthful_cost, receivable_truthful = score(truth)

    best_report: PreferenceProfile | None = None
    best_cost: Fraction | None = None
    best_received: frozenset[str | None] = receivable_truthful
    for order in permutations(problem.school_ids):
        report = PreferenceProfile.from_lists([[s] for s in order])
        cost, received = score(_with_report(truth, student_id, report))
        if cost < truthful_cost and (best_cost is None or cost < best_cost):
            best_report = report
            best_cost = cost
            best_received = received
    return StrategyReport(
        student=student_id,
        truthful_expected_cost=truthful_cost,
        best_misreport=best_report,
        misreport_expected_cost=best_cost,
        receivable_truthful=receivable_truthful,
        receivable_after=best_received,
    )


@dataclass(frozen=True)
class HomogeneityRecord:
    """Measured optimum counts for the two canonical homogeneous instances.

    homogeneous_* describe the instance where every student shares the
    identity ranking; focal_* describe the instance where student i1 instead
    reports the rotation s2 > s3 > ... > sn > s1 against that population.
    """

    n: int
    homogeneous_optima: int
    homogeneous_shared_cost: CostValue
    focal_receivable: frozenset[str]
    focal_optima: int
    per_school_optima: tuple[tuple[str, int], ...]
    ok: bool


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise AssertionError(message)


def verify_homogeneous_counts(
    n: int, transform: UtilityTransform
) -> HomogeneityRecord:
    """Count optima on n-student homogeneous instances and check the closed forms.

    A fully homogeneous instance must have exactly n! optima sharing cost
    f(1) + ... + f(n). With one focal deviator, every optimum gives the focal
    student a receivable school, each receivable school appears in exactly
    (n-1)! optima, and each optimum costs
    f(rank_focal(s)) + sum_j f(rank_pop(s_j)) - f(rank_pop(s)) for the focal
    school s. Guard: n between 1 and 6 (6! = 720 optima to enumerate).
    """
    if not 1 <= n <= 6:
        raise GuardExceededError(f"homogeneous verification guards at n <= 6, got {n}")
    ids = tuple(f"s{k}" for k in range(1, n + 1))

    identical = build_homogeneous_problem(ids, ids)
    resolved = resolve_transform(transform, identical)
    optima, _, _ = solve_with_optima(identical, resolved)
    _check(optima.exhaustive, "homogeneous enumeration must be exhaustive")
    _check(
        len(optima.matchings) == factorial(n),
        f"expected {factorial(n)} optima, found {len(optima.matchings)}",
    )
    shared = sum((apply(resolved, k) for k in range(1, n + 1)), start=0)
    _check(
        optima.shared_cost == shared,
        f"shared cost {optima.shared_cost!r} != f(1)+...+f({n})",
    )

    rotation = ids[1:] + ids[:1]
    focal_problem = build_homogeneous_problem(rotation, ids)
    focal_optima, _, _ = solve_with_optima(focal_problem, resolved)
    _check(focal_optima.exhaustive, "focal enumeration must be exhaustive")
    focal_rank = {s: r + 1 for r, s in enumerate(rotation)}
    pop_rank = {s: r + 1 for r, s in enumerate(ids)}
    receivable = homogeneous_receivable_set(focal_rank, pop_rank, resolved)

    counts: dict[str, int] = {}
    pop_total = sum((apply(resolved, pop_rank[s]) for s in ids), start=0)
    for matching in focal_optima.matchings:
        school = matching.school_of("i1")
        _check(school is not None, "focal student unassigned in an optimum")
        counts[school] = counts.get(school, 0) + 1
        expected = (
            apply(resolved, focal_rank[school])
            + pop_total
            - apply(resolved, pop_rank[school])
        )
        _check(
            focal_optima.shared_cost == expected,
            f"optimum cost disagrees with the focal closed form at {school}",
        )
    _check(
        frozenset(counts) == receivable,
        f"realized schools {sorted(counts)} != receivable {sorted(receivable)}",
    )
    _check(
        all(c == factorial(n - 1) for c in counts.values()),
        f"expected {factorial(n - 1)} optima per receivable school, got {counts}",
    )
    return HomogeneityRecord(
        n=n,
        homogeneous_optima=len(optima.matchings),
        homogeneous_shared_cost=optima.shared_cost,
        focal_receivable=receivable,
        focal_optima=len(focal_optima.matchings),
        per_school_optima=tuple(sorted(counts.items())),
        ok=True,
    )
