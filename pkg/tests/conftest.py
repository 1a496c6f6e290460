"""
Shared fixtures and options for the test suite.

Long empirical runs (convergence, denoising gain, ablation ordering, scaling)
are marked ``slow`` and only run with ``pytest --runslow``.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow acceptance tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running empirical check, enabled with --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    """Seeded generator for reproducible random inputs."""
    return np.random.default_rng(20240601)


@pytest.fixture
def desk_dims():
    """Smallest volume that still supports the 11x11 SSIM window."""
    return (16, 16, 8)
