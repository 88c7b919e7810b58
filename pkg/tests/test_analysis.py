"""Matching metrics, Pareto certification, and priority-violation detection."""

from __future__ import annotations

from itertools import islice

import pytest

from conftest import (
    F1,
    IDENTITY,
    bounded_instance,
    dominated_pair_matchings,
    dominated_pair_problem,
    efficient_never_chosen_matchings,
    efficient_never_chosen_problem,
    matching_of,
    problem_of,
    rank_tension_matchings,
    rank_tension_problem,
    strict,
    three_optima_matchings,
    three_optima_problem,
)
from osmatch.analysis import (
    brute_force_rank_maximal,
    build_report,
    effective_ranks,
    is_pareto_efficient,
    is_rank_minimal,
    matching_rank,
    pareto_dominator,
    preference_index,
    priority_violations,
    rank_signature,
    violated_students,
)
from osmatch.enumeration import enumerate_min_cost
from osmatch.errors import GuardExceededError
from osmatch.exhaustive import iter_feasible_matchings
from osmatch.model import Matching, completed_problem
from osmatch.solver import run_mechanism
from osmatch.transforms import ExponentialTransform, TableTransform


def test_signatures_count_assigned_students_per_rank():
    problem = rank_tension_problem()
    top_heavy, one_deep, balanced = rank_tension_matchings(problem)
    assert rank_signature(problem, top_heavy) == (4, 0, 1, 0, 0)
    assert rank_signature(problem, one_deep) == (4, 0, 0, 0, 1)
    assert rank_signature(problem, balanced) == (1, 4, 0, 0, 0)


def test_matching_rank_is_the_worst_experienced_rank():
    problem = rank_tension_problem()
    top_heavy, one_deep, balanced = rank_tension_matchings(problem)
    assert matching_rank(problem, top_heavy) == 3
    assert matching_rank(problem, one_deep) == 5
    assert matching_rank(problem, balanced) == 2


def test_rank_maximal_search_selects_the_top_heavy_matching():
    problem = rank_tension_problem()
    top_heavy, _, _ = rank_tension_matchings(problem)
    assert brute_force_rank_maximal(problem) == frozenset({top_heavy})


def test_rank_minimality_certification():
    problem = rank_tension_problem()
    top_heavy, _, balanced = rank_tension_matchings(problem)
    assert is_rank_minimal(problem, balanced)
    assert not is_rank_minimal(problem, top_heavy)


def test_preference_index_sums_rank_offsets():
    problem = three_optima_problem()
    _, m2, _ = three_optima_matchings(problem)
    assert preference_index(problem, m2) == 2

    pair_problem = dominated_pair_problem()
    cheap, dear = dominated_pair_matchings(pair_problem)
    assert preference_index(pair_problem, cheap) == 1
    assert preference_index(pair_problem, dear) == 3


def test_unassigned_students_count_toward_the_index():
    problem = problem_of(
        {"i1": strict("s1"), "i2": strict("s1")},
        {"s1": 1},
    )
    matching = matching_of(problem, i1="s1")
    # i2 lists the only school, so staying out charges rank 2.
    assert preference_index(problem, matching) == 1
    assert matching_rank(problem, matching) == 2
    assert rank_signature(problem, matching) == (1,)


def test_dominated_matching_has_a_unique_dominator():
    problem = dominated_pair_problem()
    cheap, dear = dominated_pair_matchings(problem)
    assert pareto_dominator(problem, dear) == cheap
    assert pareto_dominator(problem, cheap) is None
    assert is_pareto_efficient(problem, cheap)
    assert not is_pareto_efficient(problem, dear)


def test_efficient_matching_no_transform_selects():
    problem = efficient_never_chosen_problem()
    stuck, swapped = efficient_never_chosen_matchings(problem)
    assert is_pareto_efficient(problem, stuck)
    assert is_pareto_efficient(problem, swapped)
    for transform in (F1, IDENTITY, ExponentialTransform(None)):
        optima = enumerate_min_cost(problem, transform)
        assert optima.exhaustive
        assert stuck not in optima.matchings


def test_no_priorities_means_no_violations():
    problem = three_optima_problem()
    for matching in three_optima_matchings(problem):
        assert priority_violations(problem, matching) == frozenset()
        assert violated_students(problem, matching) == frozenset()


def test_unassigned_high_priority_student_is_violated():
    problem = problem_of(
        {"i1": strict("s1"), "i2": strict("s1")},
        {"s1": 1},
        priorities={"s1": [["i2"], ["i1"]]},
    )
    matching = matching_of(problem, i1="s1")
    assert priority_violations(problem, matching) == frozenset(
        {("i2", "i1", "s1")}
    )
    assert violated_students(problem, matching) == frozenset({"i2"})
    # The priority-respecting assignment is clean.
    assert priority_violations(problem, matching_of(problem, i2="s1")) == frozenset()


def test_one_student_can_be_violated_through_several_assignees():
    problem = problem_of(
        {
            "i1": strict("s1", "s2"),
            "i2": strict("s1", "s2"),
            "i3": strict("s1", "s2"),
        },
        {"s1": 2, "s2": 1},
        priorities={"s1": [["i1"], ["i2", "i3"]]},
    )
    matching = matching_of(problem, i1="s2", i2="s1", i3="s1")
    pairs = priority_violations(problem, matching)
    assert pairs == frozenset({("i1", "i2", "s1"), ("i1", "i3", "s1")})
    assert violated_students(problem, matching) == frozenset({"i1"})


def test_students_left_off_priority_lists_rank_lowest():
    problem = problem_of(
        {"i1": strict("s1"), "i2": strict("s1")},
        {"s1": 1},
        priorities={"s1": [["i2"]]},
    )
    matching = matching_of(problem, i1="s1")
    assert priority_violations(problem, matching) == frozenset(
        {("i2", "i1", "s1")}
    )


def _naive_dominator_exists(problem, matching) -> bool:
    """Independent certification by scanning the whole matching universe."""
    problem = completed_problem(problem)
    base = effective_ranks(problem, matching)
    for other in iter_feasible_matchings(problem):
        ranks = effective_ranks(problem, other)
        if all(ranks[s] <= base[s] for s in base) and any(
            ranks[s] < base[s] for s in base
        ):
            return True
    return False


def test_dominator_search_agrees_with_universe_scan():
    for seed in range(40):
        problem = bounded_instance(seed, max_students=5, max_seats=5)
        completed = completed_problem(problem)
        sample = list(islice(iter_feasible_matchings(completed), 6))
        for matching in sample:
            witness = pareto_dominator(problem, matching)
            exists = _naive_dominator_exists(problem, matching)
            assert (witness is not None) == exists, (seed, matching)
            if witness is not None:
                base = effective_ranks(completed, matching)
                ranks = effective_ranks(completed, witness)
                assert all(ranks[s] <= base[s] for s in base)
                assert any(ranks[s] < base[s] for s in base)


def test_mechanism_outputs_are_pareto_efficient():
    for seed in range(50):
        problem = bounded_instance(seed + 500, max_students=7, max_seats=6)
        matching, _ = run_mechanism(problem, F1, seed)
        assert is_pareto_efficient(problem, matching), seed


def test_certifications_guard_instance_size():
    order = tuple(f"s{k}" for k in range(1, 12))
    problem = problem_of(
        {f"i{k}": strict(*order) for k in range(1, 12)},
        {s: 1 for s in order},
    )
    matching = Matching(
        problem, {f"i{k}": f"s{k}" for k in range(1, 12)}
    )
    with pytest.raises(GuardExceededError):
        pareto_dominator(problem, matching)
    with pytest.raises(GuardExceededError):
        brute_force_rank_maximal(problem)
    with pytest.raises(GuardExceededError):
        is_rank_minimal(problem, matching)


def test_build_report_collects_consistent_metrics():
    problem = dominated_pair_problem()
    cheap, dear = dominated_pair_matchings(problem)
    report = build_report(problem, dear, F1)
    assert report.preference_index == 3
    assert report.rank == 2
    assert report.signature == (0, 3, 0)
    assert report.cost == 3
    assert report.pareto == "dominated"
    assert report.dominated_by == cheap
    assert report.violated_students == frozenset()

    efficient = build_report(problem, cheap, ExponentialTransform(3))
    assert efficient.pareto == "efficient"
    assert efficient.dominated_by is None
    assert efficient.cost.scalar() == 15


def test_build_report_degrades_to_skipped_on_guard():
    order = tuple(f"s{k}" for k in range(1, 12))
    problem = problem_of(
        {f"i{k}": strict(*order) for k in range(1, 12)},
        {s: 1 for s in order},
    )
    matching = Matching(problem, {f"i{k}": f"s{k}" for k in range(1, 12)})
    report = build_report(problem, matching, F1)
    assert report.pareto == "skipped"
    assert report.dominated_by is None
    # Everyone shares one order, so i_k at s_k pays index k - 1.
    assert report.preference_index == sum(range(11))
