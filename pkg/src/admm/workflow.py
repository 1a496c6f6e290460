"""
Main TLSM solver loop.

This module wires the update nodes together in the fixed ADMM order
(X -> Z -> D1 -> D2 -> multipliers) and records per-iteration diagnostics.
"""

import logging
import time
from typing import Callable, List, Optional, Tuple

import numpy as np

from src.services import metrics
from src.tensor.core import Tensor3, as_tensor3, frobenius_norm, require_same_dims
from .conditions import all_finite, should_stop
from .nodes.d_update import update_d1, update_d2
from .nodes.multipliers import constraint_residuals, update_multipliers
from .nodes.x_update import update_x
from .nodes.z_update import update_z
from .state import IterationRecord, SolverConfig, SolverState

logger = logging.getLogger(__name__)

IterationCallback = Callable[[SolverState, IterationRecord], None]


class SolverDivergedError(FloatingPointError):
    """A non-finite value appeared in the solver state."""

    def __init__(self, iteration: int):
        self.iteration = iteration
        super().__init__(f"non-finite value in solver state at iteration {iteration}")


def step(state: SolverState, y: Tensor3, cfg: SolverConfig) -> SolverState:
    """
    Run one full ADMM round in place.

    Args:
        state: Current state, updated in place
        y: Observation
        cfg: Solver configuration

    Returns:
        The same state object
    """
    state.x = update_x(state, y, cfg)
    state.z = update_z(state, cfg)
    state.d1 = update_d1(state, y, cfg)
    state.d2 = update_d2(state, cfg)
    state.bb, state.b1, state.b2 = update_multipliers(state, y)
    state.iter += 1
    return state


def denoise(
    y: Tensor3,
    cfg: Optional[SolverConfig] = None,
    reference: Optional[Tensor3] = None,
    track_ssim: bool = False,
    callback: Optional[IterationCallback] = None,
) -> Tuple[Tensor3, List[IterationRecord]]:
    """
    Recover a clean volume from a noisy observation.

    Args:
        y: Noisy observation
        cfg: Solver configuration (defaults to the synthetic-data setting)
        reference: Clean volume; enables per-iteration PSNR
        track_ssim: Also record SSIM per iteration (requires a reference and
            frontal slices at least as large as the SSIM window)
        callback: Called after every iteration with the state and its record

    Returns:
        Tuple of (final X, per-iteration history)

    Raises:
        SolverDivergedError: If any variable becomes non-finite
        TSvdError: If a frequency slice SVD fails
    """
    cfg = cfg or SolverConfig()
    y = as_tensor3(y, "observation")
    if reference is not None:
        reference = as_tensor3(reference, "reference")
        require_same_dims(y, reference, "observation and reference")
    with_ssim = track_ssim and reference is not None and metrics.ssim_supported(y.shape)

    state = SolverState.initial(y)
    logger.info("Starting TLSM solver: dims=%s mode=%s iters=%d", y.shape, cfg.mode.value, cfg.max_iters)

    while should_stop(state, cfg) == "continue":
        started = time.perf_counter()
        previous_x = state.x
        step(state, y, cfg)
        elapsed = time.perf_counter() - started

        if not all_finite(state):
            raise SolverDivergedError(state.iter)

        # Residuals are measured on the primal variables after the D-updates.
        r_z, r_d1, r_d2 = constraint_residuals(state, y)
        prev_norm = frobenius_norm(previous_x)
        change = frobenius_norm(state.x - previous_x)
        record = IterationRecord(
            iter=state.iter,
            res_z=frobenius_norm(r_z),
            res_d1=frobenius_norm(r_d1),
            res_d2=frobenius_norm(r_d2),
            rel_change=change / prev_norm if prev_norm > 0 else (0.0 if change == 0 else np.inf),
            seconds=elapsed,
        )
        if reference is not None:
            record.psnr_db = metrics.psnr(state.x, reference)
            if with_ssim:
                record.ssim = metrics.ssim(state.x, reference)
        state.history.append(record)

        logger.debug(
            "iter %d: res_z=%.4e res_d1=%.4e res_d2=%.4e rel_change=%.3e psnr=%s",
            record.iter, record.res_z, record.res_d1, record.res_d2, record.rel_change, record.psnr_db,
        )
        if callback is not None:
            callback(state, record)

    logger.info("TLSM solver finished after %d iterations", state.iter)
    return state.x, state.history
