"""
Configuration management for the TLSM seismic denoising toolkit.

This module handles environment variables, runtime settings and logging setup.
Typed solver / noise / data settings live in pydantic models next to the code
that consumes them; this module only carries process-wide knobs.
"""

import logging
import os
from dataclasses import dataclass

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


@dataclass
class ParallelConfig:
    """Parallelism settings."""
    workers: int = 1

    def __post_init__(self):
        """Clamp the worker count to at least one."""
        if self.workers < 1:
            self.workers = 1


@dataclass
class MetricConfig:
    """Quality metric conventions."""
    psnr_peak: float = 1.0
    psnr_cap: float = 300.0  # reported when MSE == 0
    ssim_range: float = 2.0  # data normalized to [-1, 1]


@dataclass
class LoggingConfig:
    """Logging settings."""
    level: str = "WARNING"
    fmt: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


@dataclass
class AppConfig:
    """Main application configuration."""
    parallel: ParallelConfig
    metrics: MetricConfig
    logging: LoggingConfig


def load_config() -> AppConfig:
    """
    Load configuration from environment variables and defaults.

    Returns:
        AppConfig: Complete application configuration
    """
    parallel = ParallelConfig(
        workers=int(os.getenv("TLSM_WORKERS", "1")),
    )

    metrics = MetricConfig(
        psnr_peak=float(os.getenv("TLSM_PSNR_PEAK", "1.0")),
        psnr_cap=float(os.getenv("TLSM_PSNR_CAP", "300.0")),
        ssim_range=float(os.getenv("TLSM_SSIM_RANGE", "2.0")),
    )

    log = LoggingConfig(
        level=os.getenv("TLSM_LOG_LEVEL", "WARNING").upper(),
    )

    return AppConfig(parallel=parallel, metrics=metrics, logging=log)


def setup_logging(level: str | None = None) -> None:
    """Install the root log handler at the configured level."""
    logging.basicConfig(
        level=getattr(logging, (level or config.logging.level).upper(), logging.WARNING),
        format=config.logging.fmt,
    )


# Global configuration instance
config = load_config()
