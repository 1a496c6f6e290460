"""
Benchmark service for noise-condition grids and parameter sweeps.

Each grid point generates its own noisy volume, runs the solver and scores
the result. Points are independent and run on a thread pool sized by
``TLSM_WORKERS``; results are returned in grid order.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config import config
from src.admm.state import Mode, SolverConfig
from src.admm.workflow import denoise
from src.data.noise import FOOTPRINT_LEVELS, GAUSSIAN_LEVELS, NoiseSpec, add_noise
from src.data.synthetic import generate_clean
from src.services import metrics
from src.services.io.run_config import RunConfig

logger = logging.getLogger(__name__)

NoiseGrid = List[Tuple[float, float]]

SWEEPABLE = ("a", "b", "c", "tau", "lambda1", "lambda2")


def default_grid() -> NoiseGrid:
    """The 3 x 4 grid of footprint and Gaussian levels (12 conditions)."""
    return [(f, s) for f in FOOTPRINT_LEVELS for s in GAUSSIAN_LEVELS]


def parse_grid(text: str) -> NoiseGrid:
    """
    Parse ``"F1,F2,...xS1,S2,..."`` into the cartesian product of (F, sigma).

    Example:
        "0.1,0.2x0.01" -> [(0.1, 0.01), (0.2, 0.01)]
    """
    try:
        f_part, s_part = text.lower().split("x")
        f_levels = [float(v) for v in f_part.split(",") if v.strip()]
        s_levels = [float(v) for v in s_part.split(",") if v.strip()]
    except ValueError as exc:
        raise ValueError(f"grid {text!r} must look like 'F1,F2xS1,S2'") from exc
    if not f_levels or not s_levels:
        raise ValueError(f"grid {text!r} has an empty axis")
    return [(f, s) for f in f_levels for s in s_levels]


class ConditionRunner:
    """Generates, denoises and scores one (F, sigma) condition."""

    def __init__(self, run_cfg: RunConfig):
        """Build the clean volume once for all conditions."""
        self.run_cfg = run_cfg
        data = run_cfg.data
        self.clean = generate_clean(data.dims, data.events, data.dt, data.peak_freq)

    def noisy(self, f_level: float, sigma: float) -> np.ndarray:
        spec = self.run_cfg.noise.model_copy(
            update={"footprint_amplitude": f_level, "gaussian_sigma": sigma}
        )
        y, _, _ = add_noise(self.clean, NoiseSpec.model_validate(spec.model_dump()))
        return y

    def run(self, f_level: float, sigma: float, solver_cfg: SolverConfig) -> dict:
        """Score one condition with one solver configuration."""
        y = self.noisy(f_level, sigma)
        started = time.perf_counter()
        x_hat, _ = denoise(y, solver_cfg)
        seconds = time.perf_counter() - started
        psnr_db, ssim_value = self.score(x_hat)
        logger.info(
            "condition F=%s sigma=%s mode=%s psnr=%.2f ssim=%.4f (%.2fs)",
            f_level, sigma, solver_cfg.mode.value, psnr_db, ssim_value, seconds,
        )
        return {"F": f_level, "sigma": sigma, "psnr_db": psnr_db, "ssim": ssim_value, "seconds": seconds}

    def score(self, x_hat: np.ndarray) -> Tuple[float, float]:
        """PSNR and SSIM against the clean volume; SSIM is NaN below the window size."""
        if metrics.ssim_supported(x_hat.shape):
            report = metrics.evaluate(x_hat, self.clean)
            return report.psnr_db, report.ssim
        return metrics.psnr(x_hat, self.clean), float("nan")


def _map_ordered(fn, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_benchmark(
    run_cfg: RunConfig,
    grid: Optional[NoiseGrid] = None,
    modes: Iterable[Mode] = (Mode.TLSM,),
    workers: Optional[int] = None,
) -> List[dict]:
    """
    Run every (mode, F, sigma) combination.

    Args:
        run_cfg: Base configuration (solver settings, noise seed/shape, data)
        grid: (F, sigma) pairs; ``default_grid()`` when omitted
        modes: Solver modes to compare
        workers: Thread count; ``TLSM_WORKERS`` when omitted

    Returns:
        Rows with keys mode, F, sigma, psnr_db, ssim, seconds, ordered by mode
        then grid order
    """
    grid = grid or default_grid()
    runner = ConditionRunner(run_cfg)
    jobs = [(mode, f, s) for mode in modes for f, s in grid]

    def _one(job):
        mode, f_level, sigma = job
        solver_cfg = run_cfg.solver.model_copy(update={"mode": Mode(mode)})
        return {"mode": Mode(mode).value, **runner.run(f_level, sigma, solver_cfg)}

    return _map_ordered(_one, jobs, workers or config.parallel.workers)


def run_parameter_sweep(
    run_cfg: RunConfig,
    parameter: str,
    values: Sequence[float],
    grid: Optional[NoiseGrid] = None,
    workers: Optional[int] = None,
) -> List[dict]:
    """
    Vary one solver weight while holding the others fixed.

    Returns:
        Rows with keys parameter, value, F, sigma, psnr_db, ssim
    """
    if parameter not in SWEEPABLE:
        raise ValueError(f"parameter must be one of {SWEEPABLE}, got {parameter!r}")
    grid = grid or [(run_cfg.noise.footprint_amplitude, run_cfg.noise.gaussian_sigma)]
    runner = ConditionRunner(run_cfg)
    jobs = [(v, f, s) for v in values for f, s in grid]

    def _one(job):
        value, f_level, sigma = job
        solver_cfg = SolverConfig.model_validate({**run_cfg.solver.model_dump(), parameter: value})
        row = runner.run(f_level, sigma, solver_cfg)
        return {"parameter": parameter, "value": value, "F": f_level, "sigma": sigma,
                "psnr_db": row["psnr_db"], "ssim": row["ssim"]}

    return _map_ordered(_one, jobs, workers or config.parallel.workers)
