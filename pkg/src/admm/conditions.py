"""
Conditional logic for the TLSM solver loop.

These functions decide, from the current state, whether the loop continues.
"""

from typing import Literal

import numpy as np

from .state import SolverConfig, SolverState


def all_finite(state: SolverState) -> bool:
    """True when every primal and dual variable is finite."""
    return all(
        np.all(np.isfinite(t))
        for t in (state.x, state.z, state.d1, state.d2, state.bb, state.b1, state.b2)
    )


def should_stop(state: SolverState, cfg: SolverConfig) -> Literal["continue", "stop"]:
    """
    Stop after ``max_iters`` rounds, or earlier once the relative change of X
    drops below ``rel_tol`` (disabled when rel_tol == 0).

    Args:
        state: Current solver state
        cfg: Solver configuration

    Returns:
        "stop" to end the loop, "continue" otherwise
    """
    if state.iter >= cfg.max_iters:
        return "stop"
    if cfg.rel_tol > 0 and state.history and state.history[-1].rel_change < cfg.rel_tol:
        return "stop"
    return "continue"
