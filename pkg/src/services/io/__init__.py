"""Tensor files, run configuration files and CSV outputs."""
