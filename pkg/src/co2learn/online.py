"""Online-gradient-descent expert for the current online interval.

Step t applies

    w' = project_to_ball(w - eta_t * grad,  R),      eta_t = D / sqrt(beta t),

where the gradient is always evaluated at the expert's own iterate. A new
interval starts the expert either cold (w = 0), warm (inherit the previous
interval's final iterate), or at a seeded random point of the ball.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .geometry import ProblemConstants, project_to_ball
from .rng import CounterRng


@dataclass(frozen=True)
class OnlineExpertState:
    """OGD iterate w plus the 1-based step counter within the interval."""

    w: np.ndarray
    t: int
    constants: ProblemConstants

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        object.__setattr__(self, "w", w)
        if self.t < 1:
            raise ValueError(f"step counter must be >= 1, got {self.t}")
        if float(np.linalg.norm(w)) > self.constants.R * (1.0 + 1e-9):
            raise ValueError("online expert iterate left the hypothesis ball")


def eta(t: int, constants: ProblemConstants) -> float:
    """Step size D / sqrt(beta t), strictly decreasing in t."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    return constants.D / sqrt(constants.beta * t)


def ogd_step(state: OnlineExpertState, grad: np.ndarray) -> OnlineExpertState:
    """Projected gradient step at the state's own iterate; advances t."""
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != state.w.shape:
        raise ValueError(f"gradient shape {grad.shape} does not match iterate {state.w.shape}")
    w_next = project_to_ball(state.w - eta(state.t, state.constants) * grad, state.constants.R)
    return OnlineExpertState(w=w_next, t=state.t + 1, constants=state.constants)


def init_online(
    policy: str,
    constants: ProblemConstants,
    previous: np.ndarray | None = None,
    rng: CounterRng | None = None,
) -> OnlineExpertState:
    """Fresh expert for a new interval.

    cold    w = 0 (deterministic, reproducible; the regret analysis does not
            depend on the start point)
    warm    inherit the given previous iterate, which must be in the ball
    random  seeded uniform draw from the ball (experimentation only)
    """
    if policy == "cold":
        w = np.zeros(constants.dim)
    elif policy == "warm":
        if previous is None:
            raise ValueError("warm start requires the previous interval's iterate")
        w = np.asarray(previous, dtype=np.float64)
        if float(np.linalg.norm(w)) > constants.R * (1.0 + 1e-9):
            raise ValueError("warm-start iterate lies outside the hypothesis ball")
    elif policy == "random":
        if rng is None:
            raise ValueError("random start requires a seeded generator")
        direction = rng.normals(constants.dim)
        norm = float(np.linalg.norm(direction))
        radius = constants.R * float(rng.uniforms(1)[0]) ** (1.0 / constants.dim)
        w = direction * (radius / norm) if norm > 0 else np.zeros(constants.dim)
        w = project_to_ball(w, constants.R)
    else:
        raise ValueError(f"unknown init policy {policy!r}")
    return OnlineExpertState(w=w, t=1, constants=constants)
