"""
Synthetic seismic volumes built from linear events.

Axes are (inline, crossline, time). Every trace is a superposition of Ricker
wavelets centred on each event's linear moveout time

    t_e(i, j) = intercept_time + dip_inline * i + dip_crossline * j

and the volume is scaled so that max |entry| = 1.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field

from src.tensor.core import Tensor3

logger = logging.getLogger(__name__)

DEFAULT_DT = 0.002
DEFAULT_PEAK_FREQ = 10.0

# Volume sizes used in the synthetic experiments, plus a desk-scale default.
SIZE_PRESETS = {
    "desk": (40, 64, 128),
    "small": (40, 200, 400),
    "medium": (100, 200, 400),
    "large": (200, 200, 400),
    "xlarge": (400, 200, 400),
}


class EventSpec(BaseModel):
    """One planar reflection event."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    intercept_time: float = Field(..., description="Arrival time at trace (0, 0), seconds")
    dip_inline: float = Field(0.0, description="Moveout per inline trace, seconds")
    dip_crossline: float = Field(0.0, description="Moveout per crossline trace, seconds")
    amplitude: float = 1.0

    def arrival_times(self, n1: int, n2: int) -> npt.NDArray[np.float64]:
        """(n1, n2) arrival times in seconds."""
        i = np.arange(n1, dtype=np.float64)[:, None]
        j = np.arange(n2, dtype=np.float64)[None, :]
        return self.intercept_time + self.dip_inline * i + self.dip_crossline * j


def ricker(peak_freq: float, t: npt.ArrayLike, dt: Optional[float] = None) -> npt.NDArray[np.float64]:
    """
    Ricker wavelet ``(1 - 2 pi^2 f^2 t^2) exp(-pi^2 f^2 t^2)``.

    Args:
        peak_freq: Peak frequency in Hz
        t: Time(s) relative to the wavelet centre, in seconds; in samples
            when ``dt`` is given
        dt: Sampling interval in seconds

    Returns:
        Wavelet amplitude(s), 1 at t = 0

    Example:
        >>> ricker(10.0, 0.0)
        array(1.)
    """
    if peak_freq <= 0:
        raise ValueError(f"peak_freq must be positive, got {peak_freq}")
    t = np.asarray(t, dtype=np.float64)
    if dt is not None:
        t = t * dt
    arg = (np.pi * peak_freq * t) ** 2
    return (1.0 - 2.0 * arg) * np.exp(-arg)


def default_events(dims: Tuple[int, int, int], dt: float = DEFAULT_DT) -> List[EventSpec]:
    """
    Three linear events that cross at the centre of the volume.

    Dips are fixed at a few samples across the whole volume so the events stay
    inside the record at every size preset.
    """
    n1, n2, n3 = dims
    centre_time = 0.5 * n3 * dt
    ci, cj = 0.5 * (n1 - 1), 0.5 * (n2 - 1)
    span = 0.25 * n3 * dt
    layout = (
        (span / max(n1, 1), span / max(n2, 1), 1.0),
        (-span / max(n1, 1), 0.5 * span / max(n2, 1), -0.8),
        (0.0, -span / max(n2, 1), 0.6),
    )
    return [
        EventSpec(
            intercept_time=centre_time - p1 * ci - p2 * cj,
            dip_inline=p1,
            dip_crossline=p2,
            amplitude=amp,
        )
        for p1, p2, amp in layout
    ]


def generate_clean(
    dims: Tuple[int, int, int],
    events: Optional[Sequence[EventSpec]] = None,
    dt: float = DEFAULT_DT,
    peak_freq: float = DEFAULT_PEAK_FREQ,
) -> Tensor3:
    """
    Build a clean synthetic volume normalized to [-1, 1].

    Args:
        dims: (n1, n2, n3) = (inline, crossline, time samples)
        events: Events to superpose; ``default_events`` when omitted
        dt: Sampling interval, seconds
        peak_freq: Ricker peak frequency, Hz

    Returns:
        Tensor3 with max |entry| = 1, or all zeros if every event is silent
    """
    n1, n2, n3 = dims
    if events is None:
        events = default_events(dims, dt)
    if not events:
        raise ValueError("at least one event is required")

    times = np.arange(n3, dtype=np.float64) * dt
    volume = np.zeros((n1, n2, n3))
    for event in events:
        arrivals = event.arrival_times(n1, n2)
        volume += event.amplitude * ricker(peak_freq, times[None, None, :] - arrivals[:, :, None])

    peak = np.max(np.abs(volume))
    if peak > 0:
        volume /= peak
    else:
        logger.warning("generate_clean: all events are silent, returning a zero volume")
    return volume
