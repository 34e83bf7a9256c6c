"""Brute-force oracles shared by the tests.

The grid oracle enumerates the hypothesis ball at a fixed pitch and
evaluates batch objectives directly from the loss formula, independent of
any solver code path it is used to check. softplus(-z) is computed as
-log_expit(z) (scipy's compiled kernel for the same expression), which
matches logaddexp(0, -z) to the last bit and is much faster on big grids.
"""

from __future__ import annotations

import numpy as np
from scipy.special import log_expit

_GRID_CACHE: dict[tuple[float, float], np.ndarray] = {}


def ball_grid(R: float = 1.0, pitch: float = 1e-3) -> np.ndarray:
    """All points of the pitch-spaced square grid that lie in the R-ball."""
    key = (R, pitch)
    if key not in _GRID_CACHE:
        axis = np.arange(-R, R + pitch / 2, pitch)
        gx, gy = np.meshgrid(axis, axis, indexing="ij")
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        _GRID_CACHE[key] = pts[np.einsum("ij,ij->i", pts, pts) <= R * R]
    return _GRID_CACHE[key]


def grid_min_objective(
    X: np.ndarray,
    y: np.ndarray,
    C: float,
    R: float = 1.0,
    pitch: float = 1e-3,
    gamma: float = 0.0,
    anchor: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Minimum of mean normalized-logistic loss (+ optional quadratic pull
    toward ``anchor``) over the ball grid; returns (value, argmin point)."""
    grid = ball_grid(R, pitch)
    Z = (grid @ X.T) * y  # (points, samples)
    objective = -log_expit(Z).sum(axis=1) / (len(X) * C)
    if gamma:
        d = grid - anchor
        objective = objective + 0.5 * gamma * np.einsum("ij,ij->i", d, d)
    best = int(np.argmin(objective))
    return float(objective[best]), grid[best]
