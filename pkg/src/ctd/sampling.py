"""Squared-norm biased column sampling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ctd.errors import ArgumentError, EmptyInputError
from ctd.tensor import column_sq_norms


@dataclass(frozen=True, eq=False)
class ColumnDistribution:
    probabilities: np.ndarray
    total_sq_norm: float

    def __len__(self):
        return len(self.probabilities)

    def cumulative(self) -> np.ndarray:
        """Inverse-CDF table; every entry from the last positive column on is 1."""
        cdf = np.cumsum(self.probabilities)
        positive = np.flatnonzero(self.probabilities > 0)
        if positive.size:
            cdf[positive[-1]:] = 1.0
        return cdf


def column_distribution(M) -> ColumnDistribution:
    """Probability of each column proportional to its squared Euclidean norm."""
    sq = column_sq_norms(M)
    total = float(sq.sum())
    if total <= 0:
        raise EmptyInputError("cannot sample from an all-zero matrix")
    return ColumnDistribution(sq / total, total)


def sample_with_replacement(P: ColumnDistribution, s: int, seed) -> np.ndarray:
    """Draw ``s`` column indices i.i.d. from ``P``.

    Draws are prefix-consistent: for a fixed seed, the first ``s1`` draws of a
    run with ``s2 >= s1`` equal the draws of the run with ``s1``.
    """
    if s < 0:
        raise ArgumentError(f"sample size must be non-negative, got {s}")
    u = np.random.default_rng(seed).random(int(s))
    return np.searchsorted(P.cumulative(), u, side="right").astype(np.int64)


def unique_first_occurrence(indices) -> np.ndarray:
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size == 0:
        return indices
    _, first = np.unique(indices, return_index=True)
    return indices[np.sort(first)]
