"""Offline expert training for a completed interval.

The new expert minimizes, over the hypothesis ball,

    F(w) = mean loss on the interval + (gamma / 2) * ||w - v||^2

where v is the anchor: the meta-weighted combination of all maintained
experts at interval end. The anchor also carries the experts' weighted
empirical risk WL, and gamma must satisfy gamma >= WL / (4 R^2) for the
regularizer to carry information (its unconditional cap is 4 R^2).

Solver: projected gradient descent with fixed step 1/(beta + gamma) started
at the anchor. F is (beta + gamma)-smooth and gamma-strongly convex, so the
iteration descends monotonically and converges linearly; it stops when the
projected-gradient mapping norm reaches ``grad_map_tol`` and reports the
certificate either way.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log

import numpy as np

from .geometry import project_to_ball
from .losses import LossSpec, batch_mean_grad, batch_mean_loss
from .streams import IntervalBuffer

_GAMMA_ATOL = 1e-12


@dataclass(frozen=True)
class Anchor:
    """Knowledge-transfer anchor: combined expert v and the weighted risk."""

    v: np.ndarray
    weighted_loss: float

    def __post_init__(self):
        v = np.asarray(self.v, dtype=np.float64)
        object.__setattr__(self, "v", v)
        if not (0.0 <= self.weighted_loss <= 1.0 + 1e-12):
            raise ValueError(f"weighted loss must lie in [0, 1], got {self.weighted_loss}")


@dataclass(frozen=True)
class OfflineTrainConfig:
    gamma: float
    max_iters: int
    grad_map_tol: float

    def __post_init__(self):
        if not (self.gamma > 0):
            raise ValueError("gamma must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not (self.grad_map_tol > 0):
            raise ValueError("grad_map_tol must be positive")


@dataclass(frozen=True)
class OfflineTrainResult:
    """Trained expert plus the solver certificate."""

    w: np.ndarray
    grad_map_norm: float
    iterations: int
    converged: bool
    gamma: float


def omega(w: np.ndarray, anchor: Anchor) -> float:
    """Squared distance to the anchor; at most 4 R^2 inside the ball."""
    w = np.asarray(w, dtype=np.float64)
    if w.shape != anchor.v.shape:
        raise ValueError(f"dimension mismatch: {w.shape} vs {anchor.v.shape}")
    d = w - anchor.v
    return float(np.dot(d, d))


def gamma_lower_bound(anchor: Anchor, R: float) -> float:
    """Smallest admissible gamma: weighted risk over the regularizer cap 4 R^2."""
    if not (R > 0):
        raise ValueError("R must be positive")
    return anchor.weighted_loss / (4.0 * R * R)


def default_config(
    anchor: Anchor,
    spec: LossSpec,
    gamma_floor: float = 0.1,
    grad_map_tol: float = 1e-8,
) -> OfflineTrainConfig:
    """gamma = max(lower bound, floor); iteration cap sized for the linear
    rate of the (beta+gamma)-smooth, gamma-strongly-convex objective."""
    gamma = max(gamma_lower_bound(anchor, spec.constants.R), gamma_floor)
    kappa = (spec.constants.beta + gamma) / gamma
    max_iters = 50 * ceil(kappa * log(1.0 / grad_map_tol))
    return OfflineTrainConfig(gamma=gamma, max_iters=max_iters, grad_map_tol=grad_map_tol)


def train_offline(
    interval: IntervalBuffer,
    anchor: Anchor,
    config: OfflineTrainConfig,
    spec: LossSpec,
) -> OfflineTrainResult:
    """Approximately minimize the regularized interval objective.

    Starts at the anchor (feasible) and never increases the objective, so the
    returned point always scores at least as well as the anchor itself.
    """
    if interval.n == 0:
        raise ValueError("cannot train on an empty interval")
    floor = gamma_lower_bound(anchor, spec.constants.R)
    if config.gamma < floor - _GAMMA_ATOL:
        raise ValueError(
            f"gamma={config.gamma} is below the admissible floor {floor}"
        )
    R = spec.constants.R
    if float(np.linalg.norm(anchor.v)) > R * (1.0 + 1e-9):
        raise ValueError("anchor lies outside the hypothesis ball")
    X, y = interval.X, interval.y
    step = 1.0 / (spec.constants.beta + config.gamma)
    w = anchor.v.copy()
    grad_map_norm = np.inf
    for it in range(config.max_iters):
        grad = batch_mean_grad(w, X, y, spec) + config.gamma * (w - anchor.v)
        w_next = project_to_ball(w - step * grad, R)
        grad_map_norm = float(np.linalg.norm(w - w_next)) / step
        if grad_map_norm <= config.grad_map_tol:
            return OfflineTrainResult(
                w=w, grad_map_norm=grad_map_norm, iterations=it,
                converged=True, gamma=config.gamma,
            )
        w = w_next
    return OfflineTrainResult(
        w=w, grad_map_norm=grad_map_norm, iterations=config.max_iters,
        converged=False, gamma=config.gamma,
    )


def objective(w: np.ndarray, interval: IntervalBuffer, anchor: Anchor,
              gamma: float, spec: LossSpec) -> float:
    """The regularized interval objective F(w); exposed for verification."""
    return batch_mean_loss(w, interval.X, interval.y, spec) + 0.5 * gamma * omega(w, anchor)
