"""Re-weighting of user-news evidence toward under-represented users.

Two mechanisms share one per-news weight: a group-weighted count of the
news item's interacting users (0.9 per lurker, 0.09 per engager, 0.01 per
contributor by default). Edge re-weighting scales every interaction of
news i by (1 + w_i/||w||)^alpha; sample re-weighting multiplies each
sample's cross-entropy term by the same factor, with the norm taken over
the current batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .corpus import InteractionMatrix
from .participation import ParticipationProfile, UserGroup

EPS = 1e-7  # probability clamp for log stability

NORM_KINDS = ("l2", "l1", "max")


@dataclass(frozen=True)
class GroupCounts:
    lurkers: int
    engagers: int
    contributors: int


@dataclass(frozen=True)
class GroupCoefficients:
    """Per-interaction credit by group; defaults invert the 90-9-1 skew."""

    lurker: float = 0.9
    engager: float = 0.09
    contributor: float = 0.01

    def __post_init__(self) -> None:
        if min(self.lurker, self.engager, self.contributor) < 0:
            raise ValueError("group coefficients must be nonnegative")


@dataclass(frozen=True)
class WeightVector:
    """Per-news weights with their norm and the intensity exponent alpha.

    `norm` is 1.0 when all weights are zero, so the re-weighting factor
    degenerates to 1 instead of dividing by zero.
    """

    values: np.ndarray
    norm: float
    alpha: float
    norm_kind: str = "l2"


def vector_norm(values, kind: str = "l2") -> float:
    """Norm with the all-zero guard (returns 1.0 for a zero vector).

    Uses exactly-rounded summation so independent recomputations agree
    bitwise regardless of accumulation order.
    """
    vals = [float(v) for v in values]
    if kind == "l2":
        norm = math.sqrt(math.fsum(v * v for v in vals))
    elif kind == "l1":
        norm = math.fsum(abs(v) for v in vals)
    elif kind == "max":
        norm = max((abs(v) for v in vals), default=0.0)
    else:
        raise ValueError(f"unknown norm kind {kind!r}")
    return norm if norm > 0 else 1.0


def news_weight(counts: GroupCounts, coeffs: GroupCoefficients = GroupCoefficients()) -> float:
    """Group-weighted interaction count of one news item."""
    return (
        coeffs.lurker * counts.lurkers + coeffs.engager * counts.engagers
    ) + coeffs.contributor * counts.contributors


def group_count_rows(
    matrix: InteractionMatrix, profiles: dict[str, ParticipationProfile]
) -> np.ndarray:
    """Per-row (lurker, engager, contributor) counts as an (n, 3) array."""
    order = (UserGroup.LURKER, UserGroup.ENGAGER, UserGroup.CONTRIBUTOR)
    indicators = np.zeros((len(matrix.user_ids), 3))
    for j, uid in enumerate(matrix.user_ids):
        indicators[j, order.index(profiles[uid].group)] = 1.0
    binary = (matrix.values != 0).astype(float)
    return np.asarray(binary @ indicators)


def weight_vector(
    matrix: InteractionMatrix,
    profiles: dict[str, ParticipationProfile],
    coeffs: GroupCoefficients = GroupCoefficients(),
    alpha: float = 1.0,
    norm_kind: str = "l2",
    norm_rows: list[int] | None = None,
) -> WeightVector:
    """Per-news weights over all matrix rows.

    `norm_rows` restricts the norm computation to a row subset (e.g. the
    training split) while still producing a weight for every row.
    """
    counts = group_count_rows(matrix, profiles)
    values = (
        coeffs.lurker * counts[:, 0] + coeffs.engager * counts[:, 1]
    ) + coeffs.contributor * counts[:, 2]
    scope = values if norm_rows is None else values[norm_rows]
    return WeightVector(
        values=values, norm=vector_norm(scope, norm_kind), alpha=alpha, norm_kind=norm_kind
    )


def reweight_factors(values: np.ndarray, norm: float, alpha: float) -> np.ndarray:
    """(1 + w/norm)^alpha, elementwise."""
    return (1.0 + np.asarray(values, dtype=float) / norm) ** alpha


def edge_reweight(matrix: InteractionMatrix, wv: WeightVector) -> InteractionMatrix:
    """Scale every interaction of news i by (1 + w_i/norm)^alpha.

    Returns a new matrix; the binary input is not mutated. Zero entries
    stay zero, and alpha = 0 reproduces the binary matrix exactly.
    """
    factors = reweight_factors(wv.values, wv.norm, wv.alpha)
    weighted = sparse.diags(factors).dot(matrix.values).tocsr()
    return InteractionMatrix(
        values=weighted, news_ids=list(matrix.news_ids), user_ids=list(matrix.user_ids)
    )


def batch_sample_weights(
    batch_news_ids: list[str],
    matrix: InteractionMatrix,
    profiles: dict[str, ParticipationProfile],
    coeffs: GroupCoefficients = GroupCoefficients(),
    alpha: float = 1.0,
    norm_kind: str = "l2",
) -> np.ndarray:
    """Per-sample loss factors for one batch, normalized within the batch."""
    if not batch_news_ids:
        raise ValueError("batch must be nonempty")
    wv = weight_vector(matrix, profiles, coeffs, alpha, norm_kind)
    values = np.array([wv.values[matrix.row_of[nid]] for nid in batch_news_ids])
    return reweight_factors(values, vector_norm(values, norm_kind), alpha)


def ce_loss(y: float, y_hat: float, eps: float = EPS) -> float:
    """Positive-log cross-entropy term, y*log(p) + (1-y)*log(1-p), <= 0.

    Callers compose with the -1/M of `balanced_loss`.
    """
    p = min(max(float(y_hat), eps), 1.0 - eps)
    return float(y) * math.log(p) + (1.0 - float(y)) * math.log(1.0 - p)


def balanced_loss(y, y_hat, factors) -> float:
    """Factor-weighted mean negative cross-entropy (nonnegative)."""
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    factors = np.asarray(factors, dtype=float)
    if not (len(y) == len(y_hat) == len(factors)) or len(y) == 0:
        raise ValueError("y, y_hat, and factors must have equal nonzero length")
    p = np.clip(y_hat, EPS, 1.0 - EPS)
    ce = y * np.log(p) + (1.0 - y) * np.log(1.0 - p)
    return float(-(factors * ce).mean())
