"""
TLSM Seismic Denoising - tensor recovery of 3-D seismic volumes.

This package provides a complete denoising toolkit that can:
- Decompose tensors with the t-SVD and evaluate the tensor nuclear norm
- Suppress random noise and acquisition footprint with the TLSM ADMM solver
- Generate synthetic seismic volumes with footprint and Gaussian noise
- Score results with PSNR and SSIM
- Run noise-condition benchmarks and parameter sweeps
"""

__version__ = "1.0.0"
__author__ = "TLSM Denoising Team"
