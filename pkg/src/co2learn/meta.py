"""Exponentially weighted forecaster over K experts.

Initial weights are priority-ascending,

    alpha_1[k] = (K + 1) / ((K + 1 - k) (K + 2 - k) K),   k = 1..K,

which sum to 1 by telescoping and give the largest weight to the expert at
index K. After each loss vector f in [0,1]^K the weights update as

    alpha'[k] = alpha[k] exp(-nu f[k]) / sum_k' alpha[k'] exp(-nu f[k'])

with step size nu = 4 sqrt(ln K / T) fixed once per online interval from the
interval's nominal horizon T. For any loss sequence in [0, 1] the weighted
cumulative loss then trails the best expert by at most sqrt(T ln K).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, sqrt
from typing import Sequence

import numpy as np

_SIMPLEX_ATOL = 1e-12


@dataclass(frozen=True)
class MetaWeights:
    """Probability vector over K experts plus the fixed step size nu."""

    alpha: np.ndarray
    nu: float
    K: int

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=np.float64)
        object.__setattr__(self, "alpha", alpha)
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if alpha.shape != (self.K,):
            raise ValueError(f"alpha must have length K={self.K}, got {alpha.shape}")
        if np.any(alpha < 0):
            raise ValueError("meta weights must be nonnegative")
        if abs(float(alpha.sum()) - 1.0) > _SIMPLEX_ATOL:
            raise ValueError(f"meta weights must sum to 1, got {alpha.sum()!r}")
        if not (self.nu >= 0 and np.isfinite(self.nu)):
            raise ValueError(f"nu must be a nonnegative real, got {self.nu}")

    @classmethod
    def fresh(cls, K: int, horizon: int) -> "MetaWeights":
        """Priority-ascending initial weights with nu set from the horizon."""
        return cls(alpha=init_weights(K), nu=step_size_nu(K, horizon), K=K)


def init_weights(K: int) -> np.ndarray:
    """Initial weight vector, ascending in k; entry K is the largest."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    k = np.arange(1, K + 1, dtype=np.float64)
    return (K + 1.0) / ((K + 1.0 - k) * (K + 2.0 - k) * K)


def step_size_nu(K: int, T: int) -> float:
    """4 sqrt(ln K / T); zero when K = 1."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    return 4.0 * sqrt(log(K) / T)


def combine(weights: MetaWeights, experts: Sequence[np.ndarray]) -> np.ndarray:
    """Weighted average sum_k alpha[k] * experts[k].

    Stays in the hypothesis ball without projection: the ball is convex and
    all experts are inside it.
    """
    if len(experts) != weights.K:
        raise ValueError(f"expected {weights.K} experts, got {len(experts)}")
    stacked = np.asarray(experts, dtype=np.float64)
    return weights.alpha @ stacked


def update_weights(weights: MetaWeights, losses: np.ndarray) -> MetaWeights:
    """One exponential-weighting step on a loss vector in [0, 1]^K."""
    losses = np.asarray(losses, dtype=np.float64)
    if losses.shape != (weights.K,):
        raise ValueError(f"expected {weights.K} losses, got {losses.shape}")
    if np.any(losses < -_SIMPLEX_ATOL) or np.any(losses > 1.0 + _SIMPLEX_ATOL):
        raise ValueError("expert losses must lie in [0, 1]")
    scaled = weights.alpha * np.exp(-weights.nu * losses)
    return MetaWeights(alpha=scaled / scaled.sum(), nu=weights.nu, K=weights.K)
