"""Fairness indices over per-undertaking granted importance.

The GA objective and the conflict repair both score an allocation through
the vector of granted importance sums, one entry per railway undertaking.
Before an index is applied the sums are raised to a sensitivity exponent
``alpha`` so that small shortfalls turn into large relative gaps.

All three indices are written in plain Python on purpose: the vectors are
tiny (one entry per undertaking) and these functions sit in the innermost
loop of the repair heuristic, where numpy's per-call overhead dominates.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence


class IndexKind(str, enum.Enum):
    JAIN = "jain"
    GINI = "gini"
    ATKINSON = "atkinson"
    REVENUE = "revenue"

    @classmethod
    def parse(cls, value: "str | IndexKind") -> "IndexKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"unknown index kind {value!r}; expected one of {[k.value for k in cls]}"
            ) from None


DEFAULT_ALPHA = {
    IndexKind.JAIN: 25.0,
    IndexKind.GINI: 10.0,
    IndexKind.ATKINSON: 25.0,
    IndexKind.REVENUE: 25.0,
}


@dataclass(frozen=True)
class FairnessConfig:
    """Which index drives the objective, and how it is tuned.

    ``alpha`` is the sensitivity exponent and ``epsilon`` the Atkinson
    inequality aversion (``math.inf`` selects the min-based branch).  With
    ``index_kind=REVENUE`` the objective ignores fairness, but conflict
    repair still needs an equity notion and falls back to Jain with the
    same ``alpha``.
    """

    index_kind: IndexKind = IndexKind.JAIN
    alpha: float = 25.0
    epsilon: float = 0.5

    def __post_init__(self) -> None:
        object.__setattr__(self, "index_kind", IndexKind.parse(self.index_kind))
        if not self.alpha >= 1:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")

    @classmethod
    def for_index(cls, kind: "str | IndexKind", alpha: float | None = None,
                  epsilon: float = 0.5) -> "FairnessConfig":
        kind = IndexKind.parse(kind)
        return cls(kind, DEFAULT_ALPHA[kind] if alpha is None else alpha, epsilon)

    @property
    def repair_kind(self) -> IndexKind:
        return IndexKind.JAIN if self.index_kind is IndexKind.REVENUE else self.index_kind


def alpha_transform(importance_sums: Sequence[float], alpha: float) -> list[float]:
    """Raise each granted-importance sum to the power ``alpha``."""
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    out = []
    for v in importance_sums:
        if v < 0:
            raise ValueError(f"importance sums must be non-negative, got {v}")
        out.append(v ** alpha)
    return out


def _normalised(x: Sequence[float]) -> list[float] | None:
    # Every index here is scale-invariant; dividing by the max keeps the
    # squares/roots away from underflow when alpha is large.
    if not x:
        raise ValueError("fairness of an empty vector is undefined")
    top = max(x)
    if min(x) < 0:
        raise ValueError("fairness indices need non-negative entries")
    if top == 0:
        return None
    return [v / top for v in x]


def jain(x: Sequence[float]) -> float:
    """Jain's index ``(sum x)^2 / (n * sum x^2)``, in ``[1/n, 1]``.

    An all-zero vector is treated as perfectly fair and returns 1.
    """
    y = _normalised(x)
    if y is None:
        return 1.0
    s = math.fsum(y)
    sq = math.fsum(v * v for v in y)
    return min(1.0, s * s / (len(y) * sq))


def gini_coefficient(x: Sequence[float]) -> float:
    y = _normalised(x)
    if y is None:
        return 0.0
    n = len(y)
    diff = math.fsum(abs(a - b) for a in y for b in y)
    mean = math.fsum(y) / n
    return diff / (2 * n * n * mean)


def gini_fairness(x: Sequence[float]) -> float:
    """``1 - G`` where G is the mean-absolute-difference Gini coefficient."""
    return 1.0 - gini_coefficient(x)


def atkinson_index(x: Sequence[float], epsilon: float = 0.5) -> float:
    """Atkinson inequality index with aversion ``epsilon``.

    ``epsilon == 1`` uses the geometric mean and ``epsilon == inf`` the
    minimum.  Zero entries are allowed everywhere; for ``epsilon >= 1`` they
    drive the equally-distributed-equivalent to 0, i.e. maximal inequality.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    y = _normalised(x)
    if y is None:
        return 0.0
    n = len(y)
    mean = math.fsum(y) / n
    if math.isinf(epsilon):
        ede = min(y)
    elif epsilon == 1:
        if min(y) == 0:
            ede = 0.0
        else:
            ede = math.exp(math.fsum(math.log(v) for v in y) / n)
    else:
        p = 1.0 - epsilon
        if p < 0 and min(y) == 0:
            ede = 0.0
        else:
            ede = (math.fsum(v ** p for v in y) / n) ** (1.0 / p)
    return min(1.0, max(0.0, 1.0 - ede / mean))


def atkinson_fairness(x: Sequence[float], epsilon: float = 0.5) -> float:
    return 1.0 - atkinson_index(x, epsilon)


def fairness_value(importance_sums: Sequence[float], cfg: FairnessConfig,
                   kind: IndexKind | None = None) -> float:
    """Score granted-importance sums with the configured index after the alpha transform.

    ``kind`` overrides ``cfg.index_kind``; REVENUE maps to 1.0 here because
    revenue-only fitness has no fairness factor.
    """
    kind = cfg.index_kind if kind is None else kind
    if kind is IndexKind.REVENUE:
        return 1.0
    x = alpha_transform(importance_sums, cfg.alpha)
    if kind is IndexKind.JAIN:
        return jain(x)
    if kind is IndexKind.GINI:
        return gini_fairness(x)
    return atkinson_fairness(x, cfg.epsilon)


def pairwise_difference_sum(importance_sums: Sequence[float]) -> float:
    """Sum of ``|I_i - I_j|`` over unordered pairs ``i < j``."""
    v = list(importance_sums)
    return math.fsum(abs(v[i] - v[j]) for i in range(len(v)) for j in range(i + 1, len(v)))


def max_inequity(n: int) -> float:
    """Largest achievable unordered pairwise difference sum for ``n`` values in [0, 1]."""
    if n < 2:
        raise ValueError(f"inequity needs at least two undertakings, got {n}")
    return n * n / 4 if n % 2 == 0 else (n * n - 1) / 4


def inequity_percent(importance_sums: Sequence[float]) -> float:
    n = len(importance_sums)
    return 100.0 * pairwise_difference_sum(importance_sums) / max_inequity(n)


def assigned_importance_percent(importance_sums: Sequence[float]) -> float:
    if not importance_sums:
        raise ValueError("need at least one undertaking")
    return 100.0 * math.fsum(importance_sums) / len(importance_sums)


def assigned_capacity_percent(importance_sums: Sequence[float],
                              capacities: Sequence[float]) -> float:
    """Capacity-weighted mean of granted importance, as a percentage.

    Normalised by the total capacity so that equal capacities reproduce
    :func:`assigned_importance_percent`.
    """
    if len(importance_sums) != len(capacities):
        raise ValueError(
            f"got {len(importance_sums)} importance sums but {len(capacities)} capacities"
        )
    total = math.fsum(capacities)
    if total <= 0:
        raise ValueError("capacities must have a positive sum")
    return 100.0 * math.fsum(i * c for i, c in zip(importance_sums, capacities)) / total
