"""
Services module for the TLSM denoising toolkit.

This module contains quality metrics, the benchmark and sweep runners, the
CLI command implementations and file I/O.
"""
