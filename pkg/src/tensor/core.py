"""
Dense 3-D tensor primitives.

A Tensor3 is a C-ordered float64 ``numpy`` array of shape (n1, n2, n3);
entry (i, j, k) lives at flat offset ``(i * n2 + j) * n3 + k``. Frontal slice k
is ``t[:, :, k]``. The mode-3 transform pair is forward-unnormalized and
inverse-scaled by 1/n3, which is the ``scipy.fft`` default ("backward" norm);
every spectral formula in the package assumes it.

Differences along modes 1 and 2 are circular so that they are diagonalized by
the DFT.
"""

import numpy as np
import numpy.typing as npt
from scipy import fft

from config import config

Tensor3 = npt.NDArray[np.float64]
SpectralTensor3 = npt.NDArray[np.complex128]


class TensorShapeError(ValueError):
    """Raised when tensor dimensions are incompatible with an operation."""


def as_tensor3(data: npt.ArrayLike, name: str = "tensor") -> Tensor3:
    """
    Validate and coerce an array to the canonical Tensor3 layout.

    Args:
        data: Array-like with three positive dimensions
        name: Label used in error messages

    Returns:
        C-contiguous float64 array

    Raises:
        TensorShapeError: If the array is not 3-D or has a zero dimension
        ValueError: If any entry is NaN or infinite
    """
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim != 3 or min(arr.shape) < 1:
        raise TensorShapeError(f"{name} must be a non-empty 3-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return arr


def require_same_dims(a: np.ndarray, b: np.ndarray, what: str = "operands") -> None:
    """Raise TensorShapeError unless both arrays have the same shape."""
    if a.shape != b.shape:
        raise TensorShapeError(f"{what} have mismatched dims {a.shape} and {b.shape}")


def frobenius_norm(t: Tensor3) -> float:
    """Square root of the sum of squared entries."""
    return float(np.linalg.norm(np.ravel(t)))


def inner(a: Tensor3, b: Tensor3) -> float:
    """Euclidean inner product of two tensors of equal dims."""
    require_same_dims(a, b)
    return float(np.vdot(np.ravel(a), np.ravel(b)))


def _axis(mode: int) -> int:
    if mode not in (1, 2):
        raise ValueError(f"mode must be 1 or 2, got {mode}")
    return mode - 1


def diff_circular(t: Tensor3, mode: int) -> Tensor3:
    """
    Forward circular difference along mode 1 or 2.

    ``out[i] = t[i + 1 mod n] - t[i]`` along the chosen mode.

    Example:
        Tube (1, 2, 4) along mode 1 -> (1, 2, -3)
    """
    axis = _axis(mode)
    return np.roll(t, -1, axis=axis) - t


def diff_adjoint(t: Tensor3, mode: int) -> Tensor3:
    """
    Adjoint of ``diff_circular``: ``out[i] = t[i - 1 mod n] - t[i]``.

    Example:
        Tube (1, 2, 4) along mode 1 -> (3, -1, -2)
    """
    axis = _axis(mode)
    return np.roll(t, 1, axis=axis) - t


def diff_eigenvalues(n: int) -> npt.NDArray[np.float64]:
    """
    Eigenvalues of the circular ``D^T D`` operator of length n.

    ``2 - 2 cos(2 pi k / n)`` for k = 0..n-1, in DFT frequency order.
    """
    k = np.arange(n, dtype=np.float64)
    return 2.0 - 2.0 * np.cos(2.0 * np.pi * k / n)


def fft_mode3(t: Tensor3) -> SpectralTensor3:
    """Unnormalized DFT of every mode-3 tube."""
    return fft.fft(t, axis=2, workers=config.parallel.workers)


def ifft_mode3(s: SpectralTensor3) -> Tensor3:
    """Inverse of ``fft_mode3`` (scaled by 1/n3), real part kept."""
    return np.ascontiguousarray(fft.ifft(s, axis=2, workers=config.parallel.workers).real)
