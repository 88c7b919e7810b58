"""Seeded random instance generation for property tests and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random

from .model import (
    PreferenceProfile,
    PriorityStructure,
    School,
    SchoolChoiceProblem,
    Student,
)


@dataclass(frozen=True)
class InstanceSpec:
    """Knobs for one random instance; equal specs generate equal instances.

    tie_prob is the chance each school joins the previous one's tier instead
    of opening a new tier; incomplete_prob is the chance a profile stops
    after each completed tier; skew > 0 concentrates early draws on
    low-index schools (weight exp(-skew * school_index)), skew 0 is uniform.
    """

    students: int
    schools: int
    cap_min: int = 1
    cap_max: int = 1
    tie_prob: float = 0.0
    incomplete_prob: float = 0.0
    skew: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.students < 1 or self.schools < 1:
            raise ValueError("need at least one student and one school")
        if not 1 <= self.cap_min <= self.cap_max:
            raise ValueError(
                f"capacity range must satisfy 1 <= min <= max, "
                f"got [{self.cap_min}, {self.cap_max}]"
            )
        for name in ("tie_prob", "incomplete_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        if self.skew < 0:
            raise ValueError(f"skew must be >= 0, got {self.skew}")


def _weighted_order(rng: Random, weights: list[float], ids: list[str]) -> list[str]:
    """Sample a full ranking without replacement, heavier ids earlier."""
    pool = list(range(len(ids)))
    order: list[str] = []
    while pool:
        total = sum(weights[k] for k in pool)
        pick = rng.random() * total
        acc = 0.0
        chosen = pool[-1]
        for k in pool:
            acc += weights[k]
            if pick < acc:
                chosen = k
                break
        pool.remove(chosen)
        order.append(ids[chosen])
    return order


def generate_instance(spec: InstanceSpec) -> SchoolChoiceProblem:
    """Deterministic random instance: same spec, same instance, byte for byte."""
    rng = Random(spec.seed)
    school_ids = [f"s{k}" for k in range(1, spec.schools + 1)]
    weights = [math.exp(-spec.skew * k) for k in range(spec.schools)]

    schools = tuple(
        School(school_id, rng.randint(spec.cap_min, spec.cap_max), PriorityStructure())
        for school_id in school_ids
    )

    students = []
    for index in range(1, spec.students + 1):
        order = _weighted_order(rng, weights, school_ids)
        tiers: list[list[str]] = [[order[0]]]
        for school_id in order[1:]:
            if rng.random() < spec.tie_prob:
                tiers[-1].append(school_id)
            else:
                tiers.append([school_id])
        kept: list[list[str]] = []
        for tier in tiers:
            kept.append(tier)
            if rng.random() < spec.incomplete_prob:
                break
        students.append(
            Student(f"i{index}", PreferenceProfile.from_lists(kept))
        )

    return SchoolChoiceProblem(tuple(students), schools)
