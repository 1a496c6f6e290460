"""
Multiplier update node.
"""

from typing import Tuple

from src.tensor.core import Tensor3, diff_circular
from ..state import SolverState


def constraint_residuals(state: SolverState, y: Tensor3) -> Tuple[Tensor3, Tensor3, Tensor3]:
    """Residuals Z - X, D1 - grad1 (X - Y) and D2 - grad2 X."""
    return (
        state.z - state.x,
        state.d1 - diff_circular(state.x - y, 1),
        state.d2 - diff_circular(state.x, 2),
    )


def update_multipliers(state: SolverState, y: Tensor3) -> Tuple[Tensor3, Tensor3, Tensor3]:
    """
    B <- B - (Z - X); B1 <- B1 - (D1 - grad1 (X - Y)); B2 <- B2 - (D2 - grad2 X).

    Returns:
        New (bb, b1, b2); the state is not modified
    """
    r_z, r_d1, r_d2 = constraint_residuals(state, y)
    return state.bb - r_z, state.b1 - r_d1, state.b2 - r_d2
