"""
Tensor-tensor product and t-SVD.

The t-product ``A * B`` is circular convolution of tubes, computed as one
matrix product per mode-3 frequency. The t-SVD factors a real tensor as
``U * S * V^T`` by taking a matrix SVD of every frequency slice. Only slices
0..n3//2 are decomposed; the rest are filled in by conjugate symmetry so the
spatial factors stay real.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import numpy.typing as npt
from scipy import fft

from config import config
from .core import (
    SpectralTensor3,
    Tensor3,
    TensorShapeError,
    fft_mode3,
    ifft_mode3,
)

logger = logging.getLogger(__name__)

# Relative imaginary residue above which a reconstruction is reported.
IMAG_RESIDUE_TOL = 1e-10


class TSvdError(np.linalg.LinAlgError):
    """Matrix SVD failed to converge on one frequency slice."""

    def __init__(self, frequency: int, message: str = ""):
        self.frequency = frequency
        super().__init__(f"SVD did not converge on frequency slice {frequency}{': ' + message if message else ''}")


def t_product(a: Tensor3, b: Tensor3) -> Tensor3:
    """
    Tensor-tensor product of an n1 x p x n3 and a p x n2 x n3 tensor.

    Args:
        a: Left operand
        b: Right operand

    Returns:
        n1 x n2 x n3 tensor

    Raises:
        TensorShapeError: If inner dims or n3 disagree
    """
    if a.ndim != 3 or b.ndim != 3 or a.shape[1] != b.shape[0] or a.shape[2] != b.shape[2]:
        raise TensorShapeError(f"cannot t-multiply shapes {a.shape} and {b.shape}")
    a_hat = fft_mode3(a)
    b_hat = fft_mode3(b)
    c_hat = np.einsum("ipk,pjk->ijk", a_hat, b_hat)
    return ifft_mode3(c_hat)


def t_transpose(a: Tensor3) -> Tensor3:
    """Transpose every frontal slice and reverse the order of slices 2..n3."""
    at = np.transpose(a, (1, 0, 2))
    order = np.concatenate(([0], np.arange(a.shape[2] - 1, 0, -1)))
    return np.ascontiguousarray(at[:, :, order])


def t_identity(n: int, n3: int) -> Tensor3:
    """Identity tensor: first frontal slice is I_n, the others are zero."""
    eye = np.zeros((n, n, n3))
    eye[:, :, 0] = np.eye(n)
    return eye


def _fold(spectral_slices: npt.NDArray) -> SpectralTensor3:
    """(n3, p, q) frequency stack -> (p, q, n3) spectral tensor."""
    return np.moveaxis(spectral_slices, 0, 2)


@dataclass
class TSvdFactors:
    """
    Factors of a t-SVD, kept in the frequency domain.

    Attributes:
        u_hat: (n3, n1, r_u) left singular matrices per frequency
        vh_hat: (n3, r_v, n2) conjugate-transposed right singular matrices
        spectral_singulars: (n3, min(n1, n2)) nonnegative, nonincreasing rows
        shape: (n1, n2, n3) of the factored tensor
    """
    u_hat: npt.NDArray[np.complex128]
    vh_hat: npt.NDArray[np.complex128]
    spectral_singulars: npt.NDArray[np.float64]
    shape: tuple
    _spatial: dict = field(default_factory=dict, repr=False)

    @property
    def rank_bound(self) -> int:
        return self.spectral_singulars.shape[1]

    @property
    def U(self) -> Tensor3:
        """Spatial-domain left factor (orthogonal under the t-product)."""
        if "U" not in self._spatial:
            self._spatial["U"] = ifft_mode3(_fold(self.u_hat))
        return self._spatial["U"]

    @property
    def V(self) -> Tensor3:
        """Spatial-domain right factor (orthogonal under the t-product)."""
        if "V" not in self._spatial:
            v_hat = np.conj(np.transpose(self.vh_hat, (0, 2, 1)))
            self._spatial["V"] = ifft_mode3(_fold(v_hat))
        return self._spatial["V"]

    @property
    def S(self) -> Tensor3:
        """Spatial-domain f-diagonal singular tensor, sized to U and V."""
        if "S" not in self._spatial:
            n3 = self.shape[2]
            s_hat = np.zeros((n3, self.u_hat.shape[2], self.vh_hat.shape[1]), dtype=np.complex128)
            r = self.rank_bound
            idx = np.arange(r)
            s_hat[:, idx, idx] = self.spectral_singulars
            self._spatial["S"] = ifft_mode3(_fold(s_hat))
        return self._spatial["S"]


def _batched_svd(stack: npt.NDArray, full_matrices: bool):
    try:
        return np.linalg.svd(stack, full_matrices=full_matrices)
    except np.linalg.LinAlgError:
        # Locate the offending slice for the error report.
        for k, mat in enumerate(stack):
            try:
                np.linalg.svd(mat, full_matrices=full_matrices)
            except np.linalg.LinAlgError as exc:
                raise TSvdError(k, str(exc)) from exc
        raise


def t_svd(l: Tensor3, full_matrices: bool = True) -> TSvdFactors:
    """
    Compute the t-SVD of a real tensor.

    Args:
        l: n1 x n2 x n3 real tensor
        full_matrices: Keep square U (n1 x n1) and V (n2 x n2) factors. The
            solver passes False and works with the thin r = min(n1, n2) factors.

    Returns:
        TSvdFactors

    Raises:
        TSvdError: If a frequency slice SVD does not converge
    """
    n1, n2, n3 = l.shape
    l_hat = np.moveaxis(fft_mode3(l), 2, 0)
    half = n3 // 2 + 1

    u_half, s_half, vh_half = _batched_svd(l_hat[:half], full_matrices)
    # DC and (for even n3) Nyquist slices are real; decompose them in real
    # arithmetic so the spatial factors carry no imaginary part.
    real_slices = (0, n3 // 2) if n3 % 2 == 0 and n3 > 1 else (0,)
    for k in real_slices:
        try:
            u_k, s_k, vh_k = np.linalg.svd(l_hat[k].real, full_matrices=full_matrices)
        except np.linalg.LinAlgError as exc:
            raise TSvdError(k, str(exc)) from exc
        u_half[k], s_half[k], vh_half[k] = u_k, s_k, vh_k

    u_hat = np.empty((n3,) + u_half.shape[1:], dtype=np.complex128)
    vh_hat = np.empty((n3,) + vh_half.shape[1:], dtype=np.complex128)
    s = np.empty((n3, s_half.shape[1]), dtype=np.float64)
    u_hat[:half], vh_hat[:half], s[:half] = u_half, vh_half, s_half
    # Frequencies above n3 // 2 mirror their conjugate partners.
    mirror = np.arange(half, n3)
    partner = n3 - mirror
    u_hat[mirror] = np.conj(u_half[partner])
    vh_hat[mirror] = np.conj(vh_half[partner])
    s[mirror] = s_half[partner]

    return TSvdFactors(u_hat=u_hat, vh_hat=vh_hat, spectral_singulars=s, shape=(n1, n2, n3))


def t_reconstruct(f: TSvdFactors, new_spectral_singulars: Optional[npt.ArrayLike] = None) -> Tensor3:
    """
    Rebuild ``U * S_hat * V^T`` with replacement per-frequency singular values.

    Args:
        f: Factors from ``t_svd``
        new_spectral_singulars: (n3, min(n1, n2)) nonnegative values; the
            original singular values are used when omitted

    Returns:
        Real n1 x n2 x n3 tensor

    Raises:
        ValueError: On a shape mismatch or negative entries
    """
    s = f.spectral_singulars if new_spectral_singulars is None else np.asarray(new_spectral_singulars, dtype=np.float64)
    if s.shape != f.spectral_singulars.shape:
        raise ValueError(f"replacement singulars have shape {s.shape}, expected {f.spectral_singulars.shape}")
    if np.any(s < 0):
        raise ValueError("replacement singular values must be nonnegative")

    r = f.rank_bound
    z_hat = np.einsum("kir,kr,krj->ijk", f.u_hat[:, :, :r], s, f.vh_hat[:, :r, :])
    full = fft.ifft(z_hat, axis=2, workers=config.parallel.workers)

    scale = np.linalg.norm(full.real)
    residue = np.linalg.norm(full.imag)
    if scale > 0 and residue > IMAG_RESIDUE_TOL * scale:
        logger.warning("t_reconstruct: imaginary residue %.3e relative to %.3e truncated", residue, scale)
    return np.ascontiguousarray(full.real)


def tensor_nuclear_norm(t: Tensor3) -> float:
    """Sum of per-frequency nuclear norms divided by n3."""
    n3 = t.shape[2]
    s = np.linalg.svd(np.moveaxis(fft_mode3(t), 2, 0), compute_uv=False)
    return float(s.sum() / n3)
