"""Utility transforms mapping 1-based ranks to exact cardinal costs.

Three families are supported: Linear (a*r + b), Exponential (base^r), and
Table (explicit rank -> value). All cost arithmetic is exact; floating point
never enters a cost path. Exponential costs come in two realizations that
induce the same order on matchings whenever the base is at least the seat
count: an exact integer scalar base^r, and a RankTally, the count-per-rank
vector compared lexicographically from the highest rank downward.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Union

from .errors import TransformError
from .model import Matching, SchoolChoiceProblem, effective_rank

# Balanced-digit width for RankTally encodings. Counts and their algebraic
# combinations stay far below 2^31 for any instance the size guards admit, so
# decoded digits always equal the formal rank counts.
_SHIFT = 32
_LIMB = (1 << _SHIFT) - 1
_HALF = 1 << (_SHIFT - 1)


class RankTally:
    """Count of cost contributions per rank, ordered lexicographically.

    The vector (count_1, count_2, ...) is stored as the single integer
    sum(count_r << (32 * r)). Integer addition is exactly componentwise
    vector addition, and because every integer has a unique balanced-digit
    expansion with digits in [-2^31, 2^31), integer order coincides with
    lexicographic order on those digit vectors read from the highest rank
    downward. The kernel can therefore run directly on encodings.

    Plain ints mix in as rank-0 counts (scalar value count * base^0), which
    makes 0 the shared additive identity across realizations.
    """

    __slots__ = ("base", "enc")

    def __init__(self, base: int, enc: int = 0):
        self.base = base
        self.enc = enc

    @classmethod
    def unit(cls, base: int, rank: int) -> "RankTally":
        """The tally of a single cost contribution at the given rank."""
        return cls(base, 1 << (_SHIFT * rank))

    @classmethod
    def from_counts(cls, base: int, counts: dict[int, int]) -> "RankTally":
        enc = 0
        for rank, count in counts.items():
            enc += count << (_SHIFT * rank)
        return cls(base, enc)

    def counts(self) -> dict[int, int]:
        """Balanced-digit decode back to {rank: count}, omitting zeros."""
        out: dict[int, int] = {}
        x = self.enc
        rank = 0
        while x:
            digit = x & _LIMB
            if digit >= _HALF:
                digit -= _LIMB + 1
            x = (x - digit) >> _SHIFT
            if digit:
                out[rank] = digit
            rank += 1
        return out

    def scalar(self) -> int:
        """Exact integer value sum(count_r * base^r)."""
        return sum(count * self.base**rank for rank, count in self.counts().items())

    def _enc_of(self, other: object) -> int:
        if isinstance(other, RankTally):
            if other.base != self.base:
                raise TransformError(
                    f"mixed tally bases {self.base} and {other.base}"
                )
            return other.enc
        if isinstance(other, int):
            return other
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> "RankTally":
        enc = self._enc_of(other)
        if enc is NotImplemented:
            return NotImplemented
        return RankTally(self.base, self.enc + enc)

    __radd__ = __add__

    def __sub__(self, other: object) -> "RankTally":
        enc = self._enc_of(other)
        if enc is NotImplemented:
            return NotImplemented
        return RankTally(self.base, self.enc - enc)

    def __rsub__(self, other: object) -> "RankTally":
        enc = self._enc_of(other)
        if enc is NotImplemented:
            return NotImplemented
        return RankTally(self.base, enc - self.enc)

    def __neg__(self) -> "RankTally":
        return RankTally(self.base, -self.enc)

    def __eq__(self, other: object) -> bool:
        enc = self._enc_of(other)
        if enc is NotImplemented:
            return NotImplemented
        return self.enc == enc

    def __lt__(self, other: object) -> bool:
        enc = self._enc_of(other)
        if enc is NotImplemented:
            return NotImplemented
        return self.enc < enc

    def __le__(self, other: object) -> bool:
        enc = self._enc_of(other)
        if enc is NotImplemented:
            return NotImplemented
        return self.enc <= enc

    def __gt__(self, other: object) -> bool:
        enc = self._enc_of(other)
        if enc is NotImplemented:
            return NotImplemented
        return self.enc > enc

    def __ge__(self, other: object) -> bool:
        enc = self._enc_of(other)
        if enc is NotImplemented:
            return NotImplemented
        return self.enc >= enc

    def __hash__(self) -> int:
        return hash(self.enc)

    def __bool__(self) -> bool:
        return self.enc != 0

    def __repr__(self) -> str:
        return f"RankTally(base={self.base}, counts={self.counts()})"


CostValue = Union[int, Fraction, "RankTally"]


@dataclass(frozen=True)
class LinearTransform:
    """f(r) = a*r + b with rational a > 0 and f(1) >= 0."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.a <= 0:
            raise TransformError(f"linear slope must be positive, got {self.a}")
        if self.a + self.b < 0:
            raise TransformError(
                f"linear transform is negative at rank 1: {self.a + self.b}"
            )


@dataclass(frozen=True)
class ExponentialTransform:
    """f(r) = base^r; base None means auto-select max(seats, students) + 1.

    With scalar=True costs are exact integers base^r; otherwise they are
    RankTally values, which never materialize the power.
    """

    base: int | None = None
    scalar: bool = False

    def __post_init__(self):
        if self.base is not None and self.base < 2:
            raise TransformError(
                f"exponential base must be an integer >= 2, got {self.base}"
            )


@dataclass(frozen=True)
class TableTransform:
    """Explicit costs for ranks 1..len(values), strictly increasing, >= 0."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        if not self.values:
            raise TransformError("table transform has no entries")
        if self.values[0] < 0:
            raise TransformError("table transform has a negative value")
        for left, right in zip(self.values, self.values[1:]):
            if right <= left:
                raise TransformError(
                    f"table transform is not strictly increasing: {left} then {right}"
                )

    @classmethod
    def from_mapping(cls, mapping: dict[int, Fraction]) -> "TableTransform":
        if not mapping:
            raise TransformError("table transform has no entries")
        expected = list(range(1, len(mapping) + 1))
        if sorted(mapping) != expected:
            raise TransformError(
                f"table ranks must be contiguous from 1, got {sorted(mapping)}"
            )
        return cls(tuple(mapping[r] for r in expected))


UtilityTransform = Union[LinearTransform, ExponentialTransform, TableTransform]


def _as_number(value: Fraction) -> int | Fraction:
    return int(value) if value.denominator == 1 else value


def apply(transform: UtilityTransform, rank: int) -> CostValue:
    """Exact cost of the given 1-based rank under the transform."""
    if rank < 1:
        raise TransformError(f"rank must be >= 1, got {rank}")
    if isinstance(transform, LinearTransform):
        return _as_number(transform.a * rank + transform.b)
    if isinstance(transform, ExponentialTransform):
        if transform.base is None:
            raise TransformError(
                "exponential base is unresolved; resolve against a problem first"
            )
        if transform.scalar:
            return transform.base**rank
        return RankTally.unit(transform.base, rank)
    if isinstance(transform, TableTransform):
        if rank > len(transform.values):
            raise TransformError(
                f"rank {rank} outside table domain 1..{len(transform.values)}"
            )
        return _as_number(transform.values[rank - 1])
    raise TransformError(f"unknown transform {transform!r}")


def zero_cost(transform: UtilityTransform) -> CostValue:
    """Additive identity in the transform's cost group."""
    if isinstance(transform, ExponentialTransform) and not transform.scalar:
        if transform.base is None:
            raise TransformError(
                "exponential base is unresolved; resolve against a problem first"
            )
        return RankTally(transform.base, 0)
    return 0


def check_strictly_increasing(transform: UtilityTransform, max_rank: int) -> bool:
    """True iff f is defined, non-negative, and strictly increasing on 1..max_rank."""
    try:
        previous = apply(transform, 1)
    except TransformError:
        return False
    if previous < 0:
        return False
    for rank in range(2, max_rank + 1):
        try:
            value = apply(transform, rank)
        except TransformError:
            return False
        if not previous < value:
            return False
        previous = value
    return True


def auto_exponential_base(problem: SchoolChoiceProblem) -> int:
    """Auto base: strictly exceeds any count that can pile up at one rank."""
    return max(problem.total_seats, len(problem.students)) + 1


def resolve_transform(
    transform: UtilityTransform, problem: SchoolChoiceProblem
) -> UtilityTransform:
    """Pin an auto exponential base against a concrete problem."""
    if isinstance(transform, ExponentialTransform) and transform.base is None:
        return ExponentialTransform(auto_exponential_base(problem), transform.scalar)
    return transform


def cost_of_matching(
    transform: UtilityTransform,
    problem: SchoolChoiceProblem,
    matching: Matching,
) -> CostValue:
    """Total cost sum f(rank of assignment); unassigned pays f(r_max + 1).

    Requires completed profiles so every school has a rank for every student.
    """
    resolved = resolve_transform(transform, problem)
    total = zero_cost(resolved)
    for student_id in problem.student_ids:
        total = total + apply(resolved, effective_rank(problem, matching, student_id))
    return total


def scalar_value(cost: CostValue) -> int | Fraction:
    """Collapse a cost to its exact numeric value (tallies via sum count*base^r)."""
    if isinstance(cost, RankTally):
        return cost.scalar()
    return cost


def describe_transform(transform: UtilityTransform) -> str:
    """Canonical spec string for documents and logs."""
    if isinstance(transform, LinearTransform):
        return f"linear:a={transform.a},b={transform.b}"
    if isinstance(transform, ExponentialTransform):
        if transform.base is None:
            return "exp"
        return f"exp:base={transform.base}"
    if isinstance(transform, TableTransform):
        return "table:" + ",".join(str(v) for v in transform.values)
    raise TransformError(f"unknown transform {transform!r}")


def parse_transform_spec(spec: str) -> UtilityTransform:
    """Parse a CLI transform spec.

    Accepted forms: "linear:a=<rational>,b=<rational>", "exp",
    "exp:base=<int>", and "table:<csv path>" where the CSV holds rank,value
    rows (an optional header line is skipped). Rationals accept "2", "-1",
    "1/2", and "0.5".
    """
    spec = spec.strip()
    if spec == "exp":
        return ExponentialTransform(None)
    kind, _, rest = spec.partition(":")
    if kind == "linear":
        params: dict[str, Fraction] = {}
        for piece in rest.split(","):
            key, eq, raw = piece.partition("=")
            key = key.strip()
            if not eq or key not in ("a", "b"):
                raise TransformError(f"bad linear parameter {piece!r} in {spec!r}")
            try:
                params[key] = Fraction(raw.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise TransformError(f"bad rational {raw!r} in {spec!r}") from exc
        if set(params) != {"a", "b"}:
            raise TransformError(f"linear spec needs both a and b: {spec!r}")
        return LinearTransform(params["a"], params["b"])
    if kind == "exp":
        key, eq, raw = rest.partition("=")
        if key.strip() != "base" or not eq:
            raise TransformError(f"bad exponential spec {spec!r}")
        try:
            base = int(raw.strip())
        except ValueError as exc:
            raise TransformError(f"bad exponential base {raw!r}") from exc
        return ExponentialTransform(base)
    if kind == "table":
        return load_table(rest)
    raise TransformError(f"unknown transform spec {spec!r}")


def load_table(path: str | Path) -> TableTransform:
    """Load a rank,value CSV into a table transform, validating eagerly."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise TransformError(f"cannot read table file {path}: {exc}") from exc
    mapping: dict[int, Fraction] = {}
    for row_number, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise TransformError(
                f"{path}:{row_number}: expected two columns rank,value"
            )
        first, second = (cell.strip() for cell in row)
        try:
            rank = int(first)
        except ValueError:
            if row_number == 1:
                continue  # header line
            raise TransformError(f"{path}:{row_number}: bad rank {first!r}") from None
        try:
            value = Fraction(second)
        except (ValueError, ZeroDivisionError) as exc:
            raise TransformError(
                f"{path}:{row_number}: bad value {second!r}"
            ) from exc
        if rank in mapping:
            raise TransformError(f"{path}:{row_number}: duplicate rank {rank}")
        mapping[rank] = value
    return TableTransform.from_mapping(mapping)
