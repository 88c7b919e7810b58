"""Domain model behavior: validation, completion, rankings, matchings."""

from __future__ import annotations

import pytest

from conftest import matching_of, problem_of, strict, unique_optimum_problem
from osmatch.errors import (
    InvalidMatchingError,
    InvalidProblemError,
    UnknownIdError,
)
from osmatch.model import (
    Matching,
    PreferenceProfile,
    PriorityStructure,
    School,
    SchoolChoiceProblem,
    Student,
    complete_preferences,
    completed_problem,
    effective_rank,
    rank_tables,
    ranking_of,
    require_valid,
    validate_problem,
)


def test_validation_collects_every_violation():
    """One pass reports all problems instead of stopping at the first."""
    problem = SchoolChoiceProblem(
        students=(
            Student("i1", strict("s1", "ghost")),
            Student("i1", PreferenceProfile.from_lists([[], ["s1", "s1"]])),
        ),
        schools=(
            School("s1", 0),
            School("s1", 1, PriorityStructure.from_lists([["i1"], ["i1", "nobody"]])),
        ),
    )
    result = validate_problem(problem)
    assert not result.ok
    joined = "\n".join(result.violations)
    assert "duplicate student id 'i1'" in joined
    assert "unknown school 'ghost'" in joined
    assert "duplicate school id 's1'" in joined
    assert "capacity 0" in joined
    assert "empty preference tier" in joined
    assert "more than once" in joined
    assert "unknown student 'nobody'" in joined
    assert len(result.violations) >= 7
    with pytest.raises(InvalidProblemError) as err:
        require_valid(problem)
    assert err.value.violations == result.violations


def test_validation_accepts_clean_problem():
    assert validate_problem(unique_optimum_problem()).ok


def test_ranking_is_tier_index_plus_one():
    problem = unique_optimum_problem()
    assert ranking_of(problem, "i2") == {"s1": 3, "s2": 2, "s3": 1}


def test_ranking_with_interleaved_list():
    problem = problem_of(
        {"i5": strict("s1", "s2", "s5", "s3", "s4")},
        {"s1": 1, "s2": 1, "s3": 1, "s4": 1, "s5": 1},
    )
    assert ranking_of(problem, "i5") == {"s1": 1, "s2": 2, "s5": 3, "s3": 4, "s4": 5}


def test_completion_appends_one_shared_worst_tier():
    schools = ("s1", "s2", "s3", "s4")
    single = PreferenceProfile.from_lists([["s2"]])
    completed = complete_preferences(single, schools)
    assert completed.tiers == (
        frozenset({"s2"}),
        frozenset({"s1", "s3", "s4"}),
    )

    two = PreferenceProfile.from_lists([["s1"], ["s2"]])
    completed_two = complete_preferences(two, schools)
    assert completed_two.tiers == (
        frozenset({"s1"}),
        frozenset({"s2"}),
        frozenset({"s3", "s4"}),
    )


def test_completion_is_idempotent_and_order_preserving():
    schools = ("s1", "s2", "s3", "s4")
    profile = PreferenceProfile.from_lists([["s3"], ["s1"]])
    once = complete_preferences(profile, schools)
    assert complete_preferences(once, schools) is once
    ranks = once.ranking()
    assert ranks["s3"] < ranks["s1"] < ranks["s2"]
    assert ranks["s2"] == ranks["s4"]


def test_completed_ranking_is_total_with_minimum_one():
    problem = problem_of(
        {"i1": PreferenceProfile.from_lists([["s2", "s3"]])},
        {"s1": 1, "s2": 1, "s3": 1},
    )
    table = rank_tables(completed_problem(problem))["i1"]
    assert set(table) == {"s1", "s2", "s3"}
    assert min(table.values()) == 1
    assert table == {"s2": 1, "s3": 1, "s1": 2}


def test_completed_problem_returns_same_object_when_complete():
    problem = unique_optimum_problem()
    assert completed_problem(problem) is problem


def test_ranking_of_rejects_incomplete_profile():
    problem = problem_of(
        {"i1": PreferenceProfile.from_lists([["s2"]])},
        {"s1": 1, "s2": 1},
    )
    with pytest.raises(InvalidProblemError):
        ranking_of(problem, "i1")


def test_unassigned_rank_is_one_past_the_worst_tier():
    problem = completed_problem(
        problem_of(
            {"i1": PreferenceProfile.from_lists([["s1"]])},
            {"s1": 1, "s2": 1},
        )
    )
    profile = problem.student("i1").preferences
    assert len(profile.tiers) == 2
    assert profile.unassigned_rank() == 3


def test_matching_requires_every_student_exactly_once():
    problem = unique_optimum_problem()
    with pytest.raises(InvalidMatchingError, match="missing"):
        Matching(problem, {"i1": "s1", "i2": "s3"})
    with pytest.raises(InvalidMatchingError, match="unknown students"):
        Matching(
            problem, {"i1": "s1", "i2": "s3", "i3": "s2", "i9": None}
        )


def test_matching_rejects_unknown_school_and_over_capacity():
    problem = unique_optimum_problem()
    with pytest.raises(InvalidMatchingError, match="unknown school"):
        Matching(problem, {"i1": "s9", "i2": None, "i3": None})
    with pytest.raises(InvalidMatchingError, match="over capacity"):
        Matching(problem, {"i1": "s1", "i2": "s1", "i3": None})


def test_matching_equality_ignores_construction_order():
    problem = unique_optimum_problem()
    a = Matching(problem, {"i1": "s1", "i2": "s3", "i3": "s2"})
    b = Matching(problem, {"i3": "s2", "i2": "s3", "i1": "s1"})
    assert a == b
    assert hash(a) == hash(b)
    assert a.items() == (("i1", "s1"), ("i2", "s3"), ("i3", "s2"))
    assert a.to_dict() == {"i1": "s1", "i2": "s3", "i3": "s2"}
    assert a.roster("s3") == frozenset({"i2"})
    assert a.assigned_count() == 3


def test_matching_school_of_unknown_student():
    problem = unique_optimum_problem()
    matching = matching_of(problem, i1="s1", i2="s3", i3="s2")
    with pytest.raises(UnknownIdError):
        matching.school_of("i7")


def test_two_students_one_seat_leaves_exactly_one_out():
    from osmatch.exhaustive import iter_feasible_matchings

    problem = problem_of(
        {"i1": strict("s1"), "i2": strict("s1")},
        {"s1": 1},
    )
    universe = list(iter_feasible_matchings(completed_problem(problem)))
    assert len(universe) == 2
    for matching in universe:
        assert matching.assigned_count() == 1


def test_effective_rank_charges_unassignment_past_worst():
    problem = completed_problem(
        problem_of(
            {"i1": strict("s1", "s2"), "i2": strict("s1")},
            {"s1": 1, "s2": 1},
        )
    )
    matching = matching_of(problem, i1="s2", i2=None)
    assert effective_rank(problem, matching, "i1") == 2
    # i2's completed profile has two tiers, so staying out costs rank 3.
    assert effective_rank(problem, matching, "i2") == 3


def test_priority_tier_lookup_defaults_to_lowest():
    priorities = PriorityStructure.from_lists([["i2"], ["i3"]])
    assert priorities.tier_of("i2") == 0
    assert priorities.tier_of("i3") == 1
    assert priorities.tier_of("i1") == 2
