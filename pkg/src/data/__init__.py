"""
Synthetic data module for the TLSM denoising toolkit.

This module contains the Ricker-wavelet volume generator and the footprint
and Gaussian noise models.
"""
