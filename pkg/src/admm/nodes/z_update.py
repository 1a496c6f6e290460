"""
Z-update node.

Decomposes L = X + B with the t-SVD and shrinks the per-frequency singular
values: LSM shrink with (tau, a, eps) when the low-rank term carries the LSM
prior, plain soft-thresholding at tau / a otherwise.

The LSM sees the singular values of the orthonormal DFT slices, i.e. the
unnormalized ones divided by sqrt(n3). Their squared sum equals ||L||_F^2, so
the LSM fit term is the spatial-domain ``a/2 ||L - Z||_F^2``. The plain branch
is the classical TNN proximal operator on the unnormalized spectrum.
"""

import numpy as np

from src.tensor.core import Tensor3
from src.tensor.tsvd import t_reconstruct, t_svd
from ..prox import lsm_shrink, svt
from ..state import SolverConfig, SolverState


def shrink_singulars(singulars: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Apply the mode's low-rank shrinkage to a (n3, r) singular value array."""
    if cfg.mode.lsm_low_rank:
        scale = np.sqrt(singulars.shape[0])
        pair = lsm_shrink(
            singulars.ravel() / scale,
            cfg.low_rank_params(),
            inner_iters=cfg.inner_iters,
            freeze_theta=cfg.freeze_theta,
        )
        return scale * np.maximum(pair.signal, 0.0).reshape(singulars.shape)
    return svt(singulars, cfg.tau / cfg.a)


def prox_low_rank(l: Tensor3, cfg: SolverConfig) -> Tensor3:
    """Shrink the t-SVD spectrum of ``l`` and rebuild the tensor."""
    factors = t_svd(l, full_matrices=False)
    shrunk = shrink_singulars(factors.spectral_singulars, cfg)
    return t_reconstruct(factors, shrunk)


def update_z(state: SolverState, cfg: SolverConfig) -> Tensor3:
    """
    Compute the new Z from L = X + B.

    Raises:
        TSvdError: If a frequency slice fails to decompose
    """
    return prox_low_rank(state.x + state.bb, cfg)
