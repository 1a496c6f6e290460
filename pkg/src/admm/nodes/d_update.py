"""
D-update nodes for the two directional difference priors.

D1 tracks grad1 (X - Y), the footprint gradient across inline traces (quad
weight c, penalty lambda2). D2 tracks grad2 X, the crossline smoothness term
(quad weight b, penalty lambda1).
"""

import numpy as np

from src.tensor.core import Tensor3, diff_circular
from ..prox import LsmParams, lsm_shrink, soft_threshold
from ..state import SolverConfig, SolverState


def shrink_entries(target: Tensor3, params: LsmParams, cfg: SolverConfig) -> Tensor3:
    """Vectorize, shrink with the mode's difference prior, fold back."""
    if cfg.mode.lsm_differences:
        pair = lsm_shrink(
            target.ravel(),
            params,
            inner_iters=cfg.inner_iters,
            freeze_theta=cfg.freeze_theta,
        )
        return pair.signal.reshape(target.shape)
    return np.asarray(soft_threshold(target, params.penalty_weight / params.quad_weight))


def update_d1(state: SolverState, y: Tensor3, cfg: SolverConfig) -> Tensor3:
    """Shrink K1 = grad1 (X - Y) + B1."""
    k1 = diff_circular(state.x - y, 1) + state.b1
    return shrink_entries(k1, cfg.footprint_params(), cfg)


def update_d2(state: SolverState, cfg: SolverConfig) -> Tensor3:
    """Shrink H2 = grad2 X + B2."""
    h2 = diff_circular(state.x, 2) + state.b2
    return shrink_entries(h2, cfg.smoothness_params(), cfg)
