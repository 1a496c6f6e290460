"""
Noise synthesis: time-decaying acquisition footprint plus Gaussian noise.

The footprint is a grid pattern: every ``footprint_period``-th inline and
crossline trace carries ``F * exp(-k / footprint_decay)`` at time sample k,
all other traces are zero. Gaussian samples come from numpy's PCG64 bit
generator seeded with ``seed`` and drawn with ``Generator.standard_normal``
(ziggurat method) in C order over (n1, n2, n3).
"""

from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.tensor.core import Tensor3

DEFAULT_FOOTPRINT_PERIOD = 4

# Footprint / Gaussian levels of the synthetic experiment grid.
FOOTPRINT_LEVELS = (0.1, 0.2, 0.5)
GAUSSIAN_LEVELS = (0.01, 0.02, 0.03, 0.04)


class NoiseSpec(BaseModel):
    """One experimental noise condition."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    footprint_amplitude: float = Field(0.2, ge=0.0, le=1.0, description="F")
    gaussian_sigma: float = Field(0.02, ge=0.0, description="sigma")
    seed: int = Field(7, ge=0, lt=2**64)
    footprint_period: int = Field(DEFAULT_FOOTPRINT_PERIOD, ge=1, description="traces")
    footprint_decay: Optional[float] = Field(None, gt=0, description="samples; n3 / 4 when unset")

    def decay_for(self, n3: int) -> float:
        return self.footprint_decay if self.footprint_decay is not None else n3 / 4.0

    def summary(self) -> str:
        return (
            f"F={self.footprint_amplitude} sigma={self.gaussian_sigma} seed={self.seed} "
            f"period={self.footprint_period} decay={self.footprint_decay}"
        )


def footprint(dims: Tuple[int, int, int], spec: NoiseSpec) -> Tensor3:
    """Time-decaying grid footprint for the given dims."""
    n1, n2, n3 = dims
    period = spec.footprint_period
    on_grid = (np.arange(n1)[:, None] % period == 0) | (np.arange(n2)[None, :] % period == 0)
    decay = np.exp(-np.arange(n3, dtype=np.float64) / spec.decay_for(n3))
    return spec.footprint_amplitude * on_grid[:, :, None] * decay[None, None, :]


def gaussian(dims: Tuple[int, int, int], spec: NoiseSpec) -> Tensor3:
    """Seeded i.i.d. N(0, sigma^2) samples."""
    if spec.gaussian_sigma == 0:
        return np.zeros(dims)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    return spec.gaussian_sigma * rng.standard_normal(dims)


def add_noise(x: Tensor3, spec: NoiseSpec) -> Tuple[Tensor3, Tensor3, Tensor3]:
    """
    Contaminate a clean volume: y = x + f + n.

    Args:
        x: Clean volume
        spec: Noise condition

    Returns:
        Tuple of (noisy y, footprint f, Gaussian n)
    """
    f = footprint(x.shape, spec)
    n = gaussian(x.shape, spec)
    return x + f + n, f, n
