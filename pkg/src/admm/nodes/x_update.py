"""
X-update node.

Each frontal slice solves

    (1 + a + b D2^T D2 + c D1^T D1) X = a (Z - B) + b D2^T (D2 - B2)
                                        + c D1^T (D1 + grad1 Y - B1) + Y

where D1 / D2 are circular differences along modes 1 / 2. Both are
diagonalized by the 2-D DFT of the slice, so the solve is one division in
the frequency domain.
"""

import numpy as np
from scipy import fft

from config import config
from src.tensor.core import Tensor3, diff_adjoint, diff_circular, diff_eigenvalues
from ..state import SolverConfig, SolverState


def x_system_denominator(n1: int, n2: int, a: float, b: float, c: float) -> np.ndarray:
    """Frequency response of the system operator, shape (n1, n2, 1)."""
    lam1 = diff_eigenvalues(n1)[:, None]
    lam2 = diff_eigenvalues(n2)[None, :]
    return (1.0 + a + b * lam2 + c * lam1)[:, :, None]


def apply_x_system(x: Tensor3, a: float, b: float, c: float) -> Tensor3:
    """Apply ``(1 + a + b D2^T D2 + c D1^T D1)`` to a tensor."""
    return (
        (1.0 + a) * x
        + b * diff_adjoint(diff_circular(x, 2), 2)
        + c * diff_adjoint(diff_circular(x, 1), 1)
    )


def x_right_hand_side(
    y: Tensor3,
    z: Tensor3,
    bb: Tensor3,
    d1: Tensor3,
    d2: Tensor3,
    b1: Tensor3,
    b2: Tensor3,
    a: float,
    b: float,
    c: float,
) -> Tensor3:
    """Right-hand side of the X normal equations."""
    return (
        a * (z - bb)
        + b * diff_adjoint(d2 - b2, 2)
        + c * diff_adjoint(d1 + diff_circular(y, 1) - b1, 1)
        + y
    )


def solve_x(
    y: Tensor3,
    z: Tensor3,
    bb: Tensor3,
    d1: Tensor3,
    d2: Tensor3,
    b1: Tensor3,
    b2: Tensor3,
    a: float,
    b: float,
    c: float,
) -> Tensor3:
    """
    Solve the X normal equations for all frontal slices at once.

    The weights may be zero here (limit cases); the denominator is >= 1 + a.
    """
    n1, n2, _ = y.shape
    rhs = x_right_hand_side(y, z, bb, d1, d2, b1, b2, a, b, c)
    workers = config.parallel.workers
    spectrum = fft.fft2(rhs, axes=(0, 1), workers=workers)
    spectrum /= x_system_denominator(n1, n2, a, b, c)
    return np.ascontiguousarray(fft.ifft2(spectrum, axes=(0, 1), workers=workers).real)


def update_x(state: SolverState, y: Tensor3, cfg: SolverConfig) -> Tensor3:
    """
    Compute the new X from the current state.

    Args:
        state: Current solver state
        y: Observation
        cfg: Solver configuration

    Returns:
        Updated X (the state is not modified)
    """
    return solve_x(
        y, state.z, state.bb, state.d1, state.d2, state.b1, state.b2,
        cfg.a, cfg.b, cfg.c,
    )
