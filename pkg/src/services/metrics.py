"""
Full-reference quality metrics.

PSNR uses ``10 log10(peak^2 / MSE)``; SSIM is the single-scale index with an
11x11 Gaussian window (sigma 1.5) and K1 = 0.01, K2 = 0.03, evaluated on every
frontal (n1 x n2) slice by scikit-image, kept to the positions where the whole
window fits, and averaged over slices.
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field
from skimage.metrics import structural_similarity

from config import config
from src.tensor.core import Tensor3, require_same_dims

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


class MetricError(ValueError):
    """Raised when inputs cannot be scored."""


class MetricReport(BaseModel):
    """PSNR / SSIM of one estimate against a reference."""
    psnr_db: float
    ssim: float = Field(..., ge=-1.0, le=1.0)
    per_slice_psnr: Optional[List[float]] = None
    per_slice_ssim: Optional[List[float]] = None


def psnr(x: Tensor3, ref: Tensor3, peak: Optional[float] = None) -> float:
    """
    Peak signal-to-noise ratio in dB.

    Args:
        x: Estimate
        ref: Reference
        peak: Peak value; defaults to ``TLSM_PSNR_PEAK`` (1.0)

    Returns:
        PSNR, or the configured cap when the inputs are identical
    """
    require_same_dims(x, ref, "psnr inputs")
    peak = config.metrics.psnr_peak if peak is None else peak
    if peak <= 0:
        raise MetricError(f"peak must be positive, got {peak}")
    mse = float(np.mean(np.square(np.asarray(x, dtype=np.float64) - ref)))
    if mse == 0.0:
        return config.metrics.psnr_cap
    return float(10.0 * np.log10(peak * peak / mse))


def ssim_slice(x: np.ndarray, ref: np.ndarray, dynamic_range: float) -> float:
    """SSIM of two 2-D arrays, averaged over the positions where the window fits."""
    if min(x.shape) < SSIM_WINDOW:
        raise MetricError(f"slice {x.shape} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window")
    return float(structural_similarity(
        x,
        ref,
        data_range=dynamic_range,
        gaussian_weights=True,
        sigma=SSIM_SIGMA,
        use_sample_covariance=False,
        K1=SSIM_K1,
        K2=SSIM_K2,
    ))


def ssim_slices(x: Tensor3, ref: Tensor3, dynamic_range: Optional[float] = None) -> List[float]:
    """Per-frontal-slice SSIM values."""
    require_same_dims(x, ref, "ssim inputs")
    rng = config.metrics.ssim_range if dynamic_range is None else dynamic_range
    x = np.asarray(x, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    return [ssim_slice(x[:, :, k], ref[:, :, k], rng) for k in range(x.shape[2])]


def ssim(x: Tensor3, ref: Tensor3, dynamic_range: Optional[float] = None) -> float:
    """Mean SSIM over frontal slices."""
    return float(np.mean(ssim_slices(x, ref, dynamic_range)))


def ssim_supported(shape: tuple) -> bool:
    """Whether frontal slices are large enough for the SSIM window."""
    return min(shape[0], shape[1]) >= SSIM_WINDOW


def evaluate(x: Tensor3, ref: Tensor3, per_slice: bool = False) -> MetricReport:
    """
    Score an estimate against a reference.

    Args:
        x: Estimate
        ref: Reference
        per_slice: Also return per-frontal-slice values

    Returns:
        MetricReport
    """
    slices = ssim_slices(x, ref)
    report = MetricReport(psnr_db=psnr(x, ref), ssim=float(np.mean(slices)))
    if per_slice:
        report.per_slice_psnr = [psnr(x[:, :, k], ref[:, :, k]) for k in range(x.shape[2])]
        report.per_slice_ssim = slices
    return report
