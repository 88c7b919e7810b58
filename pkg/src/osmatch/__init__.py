"""One-sided school-choice matching by exact cost minimization.

Ordinal preferences become cardinal costs through a utility transform; a
seat-level assignment kernel finds a minimum-cost matching; enumeration,
tie-breaking, efficiency and priority audits, and strategy analysis build on
the same optimum set.
"""

from .analysis import (
    MatchingReport,
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
from .enumeration import (
    OptimumSet,
    TieBreakCriterion,
    TieBreakPolicy,
    enumerate_min_cost,
    enumerate_rank_minimal,
    matching_index_variance,
    solve_with_optima,
    tiebreak_select,
    uniform_pick,
)
from .errors import (
    EnumerationIncompleteError,
    FormatError,
    GuardExceededError,
    InvalidMatchingError,
    InvalidProblemError,
    KernelError,
    OsmatchError,
    TransformError,
    UnknownIdError,
)
from .exhaustive import brute_force_optima, iter_feasible_matchings
from .formats import (
    load_matching,
    load_problem,
    load_students_csv,
    parse_matching,
    parse_problem,
    parse_students_csv,
    render_cost,
    serialize_problem,
)
from .generate import InstanceSpec, generate_instance
from .model import (
    Matching,
    PreferenceProfile,
    PriorityStructure,
    School,
    SchoolChoiceProblem,
    Student,
    ValidationResult,
    complete_preferences,
    completed_problem,
    effective_rank,
    matched_school,
    rank_tables,
    ranking_of,
    require_valid,
    validate_problem,
)
from .report import write_report
from .solver import (
    SeatGrid,
    SolveTrace,
    assignment_cost,
    build_seat_grid,
    decode_assignment,
    hungarian_solve,
    run_mechanism,
)
from .strategy import (
    DifferenceProfile,
    HomogeneityRecord,
    StrategyReport,
    build_homogeneous_problem,
    difference_profile,
    exhaustive_best_response,
    expected_outcome,
    homogeneous_receivable_set,
    verify_homogeneous_counts,
)
from .transforms import (
    CostValue,
    ExponentialTransform,
    LinearTransform,
    RankTally,
    TableTransform,
    UtilityTransform,
    apply,
    auto_exponential_base,
    check_strictly_increasing,
    cost_of_matching,
    describe_transform,
    parse_transform_spec,
    resolve_transform,
    scalar_value,
)

__version__ = "0.1.0"
