"""
Laplacian scale mixture (LSM) proximal operators.

A coefficient vector g is modelled as ``theta * alpha``: alpha Laplacian,
theta a nonnegative hidden scale. The joint problem

    a/2 ||g - theta * alpha||^2 + sqrt(2) tau sum|alpha| + 2 tau sum log(theta + eps)

is minimised by alternating a closed-form scalar theta-step and a
soft-thresholding alpha-step. The same machinery serves the low-rank term
(on singular values) and both difference terms (on gradient entries).
"""

from typing import Union

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator

ArrayOrScalar = Union[float, npt.NDArray[np.float64]]

DEFAULT_EPSILON = 1e-6
SQRT2 = np.sqrt(2.0)


class LsmParams(BaseModel):
    """Weights of one LSM subproblem."""
    model_config = ConfigDict(frozen=True)

    penalty_weight: float = Field(..., gt=0, description="tau, lambda1 or lambda2")
    quad_weight: float = Field(..., gt=0, description="a, b or c")
    epsilon: float = Field(DEFAULT_EPSILON, gt=0, le=1e-3)

    @property
    def alpha_threshold(self) -> float:
        return SQRT2 * self.penalty_weight / self.quad_weight


class LsmPair(BaseModel):
    """Laplacian coefficients and their hidden multipliers."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    alpha: np.ndarray
    theta: np.ndarray

    @model_validator(mode="after")
    def _check(self) -> "LsmPair":
        if self.alpha.shape != self.theta.shape:
            raise ValueError("alpha and theta lengths differ")
        if np.any(self.theta < 0):
            raise ValueError("theta must be nonnegative")
        return self

    @property
    def signal(self) -> np.ndarray:
        return self.theta * self.alpha


def soft_threshold(x: ArrayOrScalar, t: float) -> ArrayOrScalar:
    """
    Soft-thresholding operator ``sign(x) * max(|x| - t, 0)``.

    Example:
        soft_threshold(2.0, 0.5) -> 1.5
    """
    if t < 0:
        raise ValueError(f"threshold must be nonnegative, got {t}")
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def svt(singulars: npt.NDArray[np.float64], threshold: float) -> npt.NDArray[np.float64]:
    """Soft-threshold singular values, clamped to stay nonnegative."""
    return np.maximum(soft_threshold(singulars, threshold), 0.0)


def theta_cost(theta: ArrayOrScalar, g: ArrayOrScalar, alpha: ArrayOrScalar, p: LsmParams) -> ArrayOrScalar:
    """Scalar objective ``r theta^2 + p theta + 2 tau log(theta + eps)``."""
    a, tau, eps = p.quad_weight, p.penalty_weight, p.epsilon
    r = 0.5 * a * np.square(alpha)
    lin = -a * g * alpha
    return r * np.square(theta) + lin * theta + 2.0 * tau * np.log(theta + eps)


def solve_theta(g: ArrayOrScalar, alpha: ArrayOrScalar, p: LsmParams) -> ArrayOrScalar:
    """
    Closed-form minimiser of the scalar theta-subproblem over theta >= 0.

    Returns 0 when the discriminant ``(p^2 - 16 r tau) / (16 r^2)`` is negative
    or alpha == 0; otherwise the best of {0, theta_1, theta_2} with negative
    stationary points discarded. Works elementwise on arrays.

    Args:
        g: Observed coefficient(s)
        alpha: Current Laplacian coefficient(s)
        p: LSM weights

    Returns:
        Nonnegative theta, scalar or array matching the broadcast input
    """
    g_arr = np.asarray(g, dtype=np.float64)
    alpha_arr = np.asarray(alpha, dtype=np.float64)
    g_arr, alpha_arr = np.broadcast_arrays(g_arr, alpha_arr)

    a, tau = p.quad_weight, p.penalty_weight
    r = 0.5 * a * np.square(alpha_arr)
    lin = -a * g_arr * alpha_arr
    active = r > 0

    with np.errstate(divide="ignore", invalid="ignore"):
        disc = np.where(active, (lin * lin - 16.0 * r * tau) / (16.0 * r * r), -1.0)
        real_roots = active & (disc >= 0)
        root = np.sqrt(np.where(real_roots, disc, 0.0))
        centre = np.where(real_roots, -lin / (4.0 * np.where(active, r, 1.0)), 0.0)
    theta_1 = centre + root
    theta_2 = centre - root

    zero = np.zeros_like(g_arr)
    best = zero
    best_cost = theta_cost(zero, g_arr, alpha_arr, p)
    for cand in (theta_1, theta_2):
        usable = real_roots & (cand >= 0)
        cand = np.where(usable, cand, 0.0)
        cost = theta_cost(cand, g_arr, alpha_arr, p)
        better = usable & (cost < best_cost)
        best = np.where(better, cand, best)
        best_cost = np.where(better, cost, best_cost)

    if np.ndim(best) == 0:
        return float(best)
    return best


def solve_alpha(g: npt.ArrayLike, theta: npt.ArrayLike, p: LsmParams) -> npt.NDArray[np.float64]:
    """
    Soft-threshold ``g / theta`` at ``sqrt(2) tau / a``; zero where theta <= eps.
    """
    g_arr = np.asarray(g, dtype=np.float64)
    theta_arr = np.asarray(theta, dtype=np.float64)
    if g_arr.shape != theta_arr.shape:
        raise ValueError(f"g and theta shapes differ: {g_arr.shape} vs {theta_arr.shape}")
    live = theta_arr > p.epsilon
    ratio = np.divide(g_arr, theta_arr, out=np.zeros_like(g_arr), where=live)
    return np.where(live, soft_threshold(ratio, p.alpha_threshold), 0.0)


def lsm_shrink(
    g: npt.ArrayLike,
    p: LsmParams,
    inner_iters: int = 1,
    freeze_theta: bool = False,
) -> LsmPair:
    """
    Alternate theta- and alpha-steps on a coefficient vector.

    Starts from alpha = g, theta = 1. Each round solves theta (elementwise)
    given alpha and then alpha given theta. With ``freeze_theta`` the theta-step
    is skipped and theta stays at 1, which reduces the shrink to plain
    soft-thresholding at ``sqrt(2) tau / a``.

    Args:
        g: Coefficients to shrink
        p: LSM weights
        inner_iters: Number of theta/alpha rounds
        freeze_theta: Keep theta fixed at 1

    Returns:
        LsmPair whose ``signal`` is the shrunk vector
    """
    if inner_iters < 1:
        raise ValueError(f"inner_iters must be >= 1, got {inner_iters}")
    g_arr = np.asarray(g, dtype=np.float64)
    alpha = g_arr.copy()
    theta = np.ones_like(g_arr)

    for _ in range(inner_iters):
        if not freeze_theta:
            theta = np.asarray(solve_theta(g_arr, alpha, p), dtype=np.float64).reshape(g_arr.shape)
        alpha = solve_alpha(g_arr, theta, p)

    return LsmPair(alpha=alpha, theta=theta)


def lsm_objective(g: npt.ArrayLike, pair: LsmPair, p: LsmParams) -> float:
    """Value of the joint LSM objective for a (alpha, theta) pair."""
    g_arr = np.asarray(g, dtype=np.float64)
    fit = 0.5 * p.quad_weight * np.sum(np.square(g_arr - pair.signal))
    sparsity = SQRT2 * p.penalty_weight * np.sum(np.abs(pair.alpha))
    scale = 2.0 * p.penalty_weight * np.sum(np.log(pair.theta + p.epsilon))
    return float(fit + sparsity + scale)
