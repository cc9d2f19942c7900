"""Greedy user classification maximizing the covariance-only sum-rate bound.

Users start as instantaneous-feedback (class-I) and are moved one at a time
to the statistical class (class-S), always moving whichever user yields the
largest bound after the move.  The bound is recorded after every move, from
all-class-I down to all-class-S, and the best recorded prefix wins.  A step
whose class-I count f cannot be funded (floor(b_total / f) = 0 bits) scores
-inf and is skipped by the final argmax; f = 0 needs no feedback at all and
is always feasible.

Ties break deterministically: lowest user index when choosing whom to move,
fewest class-S users when choosing the winning prefix.

An exhaustive oracle over all 2^K partitions is provided for small K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple, Sequence

from .channel import BeamDomainCovariance
from .rates import sum_rate_lower_bound


@dataclass(frozen=True)
class Classification:
    """Partition of users into instantaneous (class-I) and statistical (class-S).

    ``class_i`` is in ascending user order; ``class_s`` keeps selection order.
    ``bound_history`` holds the recorded bound after each greedy move
    (all-class-I first, -inf marks infeasible bit splits); empty for
    partitions not produced by the greedy.
    """

    class_i: tuple[int, ...]
    class_s: tuple[int, ...]
    bits_per_user: int
    objective: float
    bound_history: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "class_i", tuple(int(u) for u in self.class_i))
        object.__setattr__(self, "class_s", tuple(int(u) for u in self.class_s))
        members = set(self.class_i) | set(self.class_s)
        if len(members) != len(self.class_i) + len(self.class_s):
            raise ValueError("class-I and class-S sets overlap")
        if members != set(range(len(members))):
            raise ValueError("classes must partition the users 0..K-1")

    @property
    def num_users(self) -> int:
        return len(self.class_i) + len(self.class_s)


class _Partition(NamedTuple):
    class_i: tuple[int, ...]
    class_s: tuple[int, ...]


def classification_bound(
    bd_all: Sequence[BeamDomainCovariance],
    class_i: Sequence[int],
    class_s: Sequence[int],
    b_total: int,
    p_d: float,
    leakage_margin: int = 10,
    power_threshold: float = 1e-3,
) -> float:
    """Sum-rate bound of an arbitrary partition; -inf when the class-I users
    cannot each get at least one feedback bit."""
    if class_i and b_total // len(class_i) < 1:
        return -math.inf
    part = _Partition(class_i=tuple(class_i), class_s=tuple(class_s))
    report = sum_rate_lower_bound(
        bd_all, part, b_total, p_d,
        leakage_margin=leakage_margin, power_threshold=power_threshold,
    )
    return report.sum_rate


def classify_users_greedy(
    bd_all: Sequence[BeamDomainCovariance],
    b_total: int,
    p_d: float,
    leakage_margin: int = 10,
    power_threshold: float = 1e-3,
) -> Classification:
    """Greedy bound-maximizing partition of all users."""
    k_total = len(bd_all)
    if k_total < 1:
        raise ValueError("need at least one user")
    if b_total < 0:
        raise ValueError("feedback budget must be nonnegative")

    def bound(ci, cs):
        return classification_bound(
            bd_all, ci, cs, b_total, p_d,
            leakage_margin=leakage_margin, power_threshold=power_threshold,
        )

    remaining = list(range(k_total))
    selected: list[int] = []
    history = [bound(remaining, selected)]
    while remaining:
        best_user = None
        best_value = -math.inf
        for u in remaining:
            ci = [x for x in remaining if x != u]
            value = bound(ci, selected + [u])
            if value > best_value:
                best_value = value
                best_user = u
        if best_user is None:
            best_user = remaining[0]  # every move infeasible: lowest index
        remaining.remove(best_user)
        selected.append(best_user)
        history.append(bound(remaining, selected))

    best_idx = 0
    for j, value in enumerate(history):
        if value > history[best_idx]:
            best_idx = j
    class_s = tuple(selected[:best_idx])
    class_i = tuple(u for u in range(k_total) if u not in set(class_s))
    bits = b_total // len(class_i) if class_i else 0
    return Classification(
        class_i=class_i,
        class_s=class_s,
        bits_per_user=bits,
        objective=history[best_idx],
        bound_history=tuple(history),
    )


def exhaustive_classifier(
    bd_all: Sequence[BeamDomainCovariance],
    b_total: int,
    p_d: float,
    leakage_margin: int = 10,
    power_threshold: float = 1e-3,
    max_users: int = 12,
) -> Classification:
    """Global optimum of the bound over every feasible partition (small K only).

    Ties resolve to the lexicographically smallest sorted class-S tuple.
    """
    k_total = len(bd_all)
    if k_total < 1:
        raise ValueError("need at least one user")
    if k_total > max_users:
        raise ValueError(f"{k_total} users exceed the enumeration limit {max_users}")
    best_s: tuple[int, ...] | None = None
    best_value = -math.inf
    for r in range(k_total + 1):
        for cs in combinations(range(k_total), r):
            ci = tuple(u for u in range(k_total) if u not in cs)
            value = classification_bound(
                bd_all, ci, cs, b_total, p_d,
                leakage_margin=leakage_margin, power_threshold=power_threshold,
            )
            if value > best_value or (value == best_value and (best_s is None or cs < best_s)):
                best_value = value
                best_s = cs
    assert best_s is not None
    class_i = tuple(u for u in range(k_total) if u not in set(best_s))
    bits = b_total // len(class_i) if class_i else 0
    return Classification(
        class_i=class_i, class_s=best_s, bits_per_user=bits, objective=best_value
    )


def classification_rows(c: Classification) -> list[dict]:
    """Structured view for CSV/JSON export: one row per user with its class,
    selection order (0 for class-I), shared bit count and the objective."""
    order = {u: pos + 1 for pos, u in enumerate(c.class_s)}
    rows = []
    for u in sorted(c.class_i + c.class_s):
        rows.append(
            {
                "user": u,
                "label": "S" if u in order else "I",
                "selection_order": order.get(u, 0),
                "bits_per_user": c.bits_per_user,
                "objective": c.objective,
            }
        )
    return rows
