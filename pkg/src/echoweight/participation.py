"""User activity rates and the lurker/engager/contributor partition.

Users are grouped by average activities per day against two thresholds
(defaults 0.025 and 0.15). A rate exactly at a threshold goes to the
quieter group; the boundary rule is configurable only through the
threshold values themselves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path

from .corpus import InteractionMatrix, UserRecord


class UserGroup(Enum):
    LURKER = "L"
    ENGAGER = "E"
    CONTRIBUTOR = "C"


@dataclass(frozen=True)
class Thresholds:
    """Activity-rate cutoffs (activities/day) separating the groups."""

    lurker_max: float = 0.025
    engager_max: float = 0.15

    def __post_init__(self) -> None:
        if not (0 < self.lurker_max < self.engager_max):
            raise ValueError("thresholds must satisfy 0 < lurker_max < engager_max")


@dataclass(frozen=True)
class ParticipationProfile:
    user_id: str
    activity_rate: float
    group: UserGroup


class UndefinedComposition(ValueError):
    """Raised for a news item with zero interactions."""


def activity_rate(user: UserRecord) -> float:
    """Average activities per day over the account lifetime."""
    return user.total_activity_count / user.account_age_days


def categorize_user(rate: float, thresholds: Thresholds = Thresholds()) -> UserGroup:
    if rate <= thresholds.lurker_max:
        return UserGroup.LURKER
    if rate <= thresholds.engager_max:
        return UserGroup.ENGAGER
    return UserGroup.CONTRIBUTOR


def compute_profiles(
    users: list[UserRecord], thresholds: Thresholds = Thresholds()
) -> dict[str, ParticipationProfile]:
    """Profiles for every observable user, keyed by user id."""
    profiles = {}
    for user in users:
        if not user.observable:
            continue
        rate = activity_rate(user)
        profiles[user.user_id] = ParticipationProfile(
            user_id=user.user_id,
            activity_rate=rate,
            group=categorize_user(rate, thresholds),
        )
    return profiles


def group_composition(
    news_id: str,
    matrix: InteractionMatrix,
    profiles: dict[str, ParticipationProfile],
) -> tuple[Fraction, Fraction, Fraction]:
    """Fractions of a news item's interacting users in each group.

    Returned as exact rationals (lurker, engager, contributor) summing to
    1. Raises UndefinedComposition for a news item with no interactions.
    """
    row = matrix.values.getrow(matrix.row_of[news_id])
    cols = row.indices
    if len(cols) == 0:
        raise UndefinedComposition(f"news {news_id!r} has no interactions")
    counts = {UserGroup.LURKER: 0, UserGroup.ENGAGER: 0, UserGroup.CONTRIBUTOR: 0}
    for j in cols:
        counts[profiles[matrix.user_ids[j]].group] += 1
    total = len(cols)
    return (
        Fraction(counts[UserGroup.LURKER], total),
        Fraction(counts[UserGroup.ENGAGER], total),
        Fraction(counts[UserGroup.CONTRIBUTOR], total),
    )


def write_profiles(
    profiles: dict[str, ParticipationProfile], path: str | Path
) -> None:
    """Serialize profiles as jsonl: {"user_id", "rate", "group"}."""
    with open(path, "w", encoding="utf-8") as fh:
        for uid in sorted(profiles):
            p = profiles[uid]
            fh.write(
                json.dumps(
                    {"user_id": p.user_id, "rate": p.activity_rate, "group": p.group.value}
                )
                + "\n"
            )
