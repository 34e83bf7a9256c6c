"""Normalized logistic loss: convex, beta-smooth, and exactly bounded in [0, 1].

The loss of hypothesis w on sample (x, y) is

    l(w; x, y) = log(1 + exp(-y <w, x>)) / C,      C = log(1 + exp(D R)).

On the admissible domain |<w, x>| <= D R, so the numerator ranges over
[log(1 + exp(-DR)), C] and the loss stays strictly inside (0, 1]. The
gradient is

    grad l = -y x sigmoid(-y <w, x>) / C,

the smoothness constant is beta = D^2 / (4 C) (sigmoid' <= 1/4 and
||x x^T|| <= D^2), and the normalization makes beta consistent with the
step sizes derived from it. Normalizing instead of clipping keeps the loss
smooth; clipping would not. The family obeys the self-bounding property
||grad l||^2 <= 4 beta l, hence also ||grad l|| <= 2 sqrt(beta).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import ProblemConstants, Sample

# Absolute slack on the norm-bound domain checks; callers must project first,
# this only forgives float rounding from projection itself.
_DOMAIN_ATOL = 1e-9


def softplus(z):
    """log(1 + exp(z)), stable for any magnitude."""
    z = np.asarray(z, dtype=np.float64)
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def sigmoid(z):
    """1 / (1 + exp(-z)), stable for any magnitude."""
    z = np.asarray(z, dtype=np.float64)
    ez = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + ez), ez / (1.0 + ez))


@dataclass(frozen=True)
class LossSpec:
    """Loss family instance: normalizer C and the problem constants.

    Invariants: C = log(1 + exp(D*R)) and constants.beta = D^2 / (4*C),
    both to 1e-12 relative. Build via :meth:`create`.
    """

    C: float
    constants: ProblemConstants

    def __post_init__(self):
        D, R = self.constants.D, self.constants.R
        c_expected = float(softplus(D * R))
        if abs(self.C - c_expected) > 1e-12 * c_expected:
            raise ValueError(f"C={self.C} inconsistent with log(1+exp(D*R))={c_expected}")
        beta_expected = D * D / (4.0 * self.C)
        if abs(self.constants.beta - beta_expected) > 1e-12 * beta_expected:
            raise ValueError(
                f"beta={self.constants.beta} inconsistent with D^2/(4C)={beta_expected}"
            )

    @classmethod
    def create(cls, D: float, R: float, dim: int) -> "LossSpec":
        """Build the spec for given bounds; beta is derived, never user-supplied."""
        C = float(softplus(D * R))
        beta = D * D / (4.0 * C)
        return cls(C=C, constants=ProblemConstants(D=D, R=R, beta=beta, dim=dim))


def _check_domain(w: np.ndarray, x: np.ndarray, y: int, spec: LossSpec) -> None:
    c = spec.constants
    nw = float(np.linalg.norm(w))
    if nw > c.R + _DOMAIN_ATOL:
        raise ValueError(f"||w||={nw} exceeds R={c.R}; project first")
    nx = float(np.linalg.norm(x))
    if nx > c.D + _DOMAIN_ATOL:
        raise ValueError(f"||x||={nx} exceeds D={c.D}; condition the stream first")
    if y not in (-1, 1):
        raise ValueError(f"label must be -1 or +1, got {y}")


def loss(w: np.ndarray, s: Sample, spec: LossSpec) -> float:
    """Loss of hypothesis ``w`` on sample ``s``; value in [0, 1]."""
    w = np.asarray(w, dtype=np.float64)
    _check_domain(w, s.x, s.y, spec)
    z = s.y * float(np.dot(w, s.x))
    return float(softplus(-z)) / spec.C


def grad_loss(w: np.ndarray, s: Sample, spec: LossSpec) -> np.ndarray:
    """Gradient of the loss in w; norm at most D/C <= 2 sqrt(beta)."""
    w = np.asarray(w, dtype=np.float64)
    _check_domain(w, s.x, s.y, spec)
    z = s.y * float(np.dot(w, s.x))
    return (-s.y * float(sigmoid(-z)) / spec.C) * s.x


def empirical_risk(w: np.ndarray, samples: Sequence[Sample], spec: LossSpec) -> float:
    """Mean loss over a non-empty sample list."""
    if len(samples) == 0:
        raise ValueError("empirical risk of an empty sample list is undefined")
    return float(np.mean([loss(w, s, spec) for s in samples]))


# Array fast paths over pre-conditioned batches (X rows already in the D-ball).
# These skip per-call domain checks; the stream layer guarantees the bounds.

def batch_losses(w: np.ndarray, X: np.ndarray, y: np.ndarray, spec: LossSpec) -> np.ndarray:
    """Per-sample losses for a batch: rows of X against labels y."""
    z = y * (X @ w)
    return softplus(-z) / spec.C


def batch_mean_loss(w: np.ndarray, X: np.ndarray, y: np.ndarray, spec: LossSpec) -> float:
    return float(np.mean(batch_losses(w, X, y, spec)))


def batch_mean_grad(w: np.ndarray, X: np.ndarray, y: np.ndarray, spec: LossSpec) -> np.ndarray:
    """Gradient of the batch mean loss at w."""
    z = y * (X @ w)
    coef = -y * sigmoid(-z) / spec.C
    return (X * coef[:, None]).mean(axis=0)
