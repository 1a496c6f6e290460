"""
Command implementations behind the CLI.

Every ``cmd_*`` function returns a process exit code and prints summary lines
to stdout, each starting with ``tlsm:`` followed by ``key=value`` pairs.

Exit codes:
    0  success
    2  unparseable or invalid configuration / arguments
    3  I/O failure or invalid tensor file
    4  dimension mismatch between inputs
    5  solver failure (SVD non-convergence or divergence)
"""

import functools
import logging
import time
from pathlib import Path
from typing import Callable, Optional, Sequence, Tuple

import click
import numpy as np

from src.admm.state import PARAMETER_PRESETS, Mode, SolverConfig
from src.admm.workflow import SolverDivergedError, denoise
from src.data.noise import add_noise
from src.data.synthetic import SIZE_PRESETS, generate_clean
from src.services import metrics
from src.services.benchmark import default_grid, parse_grid, run_benchmark, run_parameter_sweep
from src.services.io.history import BENCHMARK_COLUMNS, SWEEP_COLUMNS, write_history_csv, write_table_csv
from src.services.io.run_config import RunConfig, RunConfigError, load_run_config
from src.services.io.tensor_file import TensorFileError, import_raw, read_tensor, write_tensor
from src.tensor.core import TensorShapeError, require_same_dims
from src.tensor.tsvd import TSvdError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DIMS = 4
EXIT_SOLVER = 5

PRESET_FIELDS = ("a", "b", "c", "tau", "lambda1", "lambda2")


def emit(**fields) -> None:
    """Print one machine-parseable summary line."""
    click.echo("tlsm: " + " ".join(f"{k}={_fmt(v)}" for k, v in fields.items()))


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, tuple):
        return "x".join(str(v) for v in value)
    if isinstance(value, Mode):
        return value.value
    return str(value)


def exit_code_for(exc: BaseException) -> int:
    """Map a domain exception onto the documented exit codes."""
    if isinstance(exc, (TSvdError, SolverDivergedError)):
        return EXIT_SOLVER
    if isinstance(exc, TensorShapeError):
        return EXIT_DIMS
    if isinstance(exc, (TensorFileError, OSError)):
        return EXIT_IO
    if isinstance(exc, (RunConfigError, ValueError)):
        return EXIT_CONFIG
    raise exc


def exit_codes(fn: Callable[..., int]) -> Callable[..., int]:
    """Turn domain exceptions raised by a command into exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs) -> int:
        try:
            return fn(*args, **kwargs)
        except Exception as exc:
            code = exit_code_for(exc)
            logger.error("%s failed: %s", fn.__name__, exc)
            click.echo(f"tlsm: error={type(exc).__name__} exit={code} message={str(exc).splitlines()[0] if str(exc) else ''}", err=True)
            return code

    return wrapper


def with_size_preset(cfg: RunConfig, name: str) -> RunConfig:
    """
    Replace the volume geometry with a named size preset.

    Geometry-dependent defaults (events, footprint decay) are re-derived for
    the new size.
    """
    try:
        n1, n2, n3 = SIZE_PRESETS[name]
    except KeyError:
        raise RunConfigError(f"unknown size preset {name!r}; choose from {sorted(SIZE_PRESETS)}") from None
    return RunConfig(
        solver=cfg.solver,
        noise=cfg.noise.model_copy(update={"footprint_decay": None}),
        data=cfg.data.model_copy(update={"n1": n1, "n2": n2, "n3": n3, "events": []}),
    )


def solver_overrides(
    base: SolverConfig,
    mode: Optional[str] = None,
    iters: Optional[int] = None,
    preset: Optional[str] = None,
) -> SolverConfig:
    """Apply CLI overrides on top of the configured solver settings."""
    values = base.model_dump()
    if preset is not None:
        if preset not in PARAMETER_PRESETS:
            raise RunConfigError(f"unknown preset {preset!r}; choose from {sorted(PARAMETER_PRESETS)}")
        values.update(zip(PRESET_FIELDS, PARAMETER_PRESETS[preset]))
    if mode is not None:
        values["mode"] = Mode(mode)
    if iters is not None:
        values["max_iters"] = iters
    return SolverConfig.model_validate(values)


@exit_codes
def cmd_generate(
    config_path: Optional[str],
    out_clean: str,
    out_noisy: str,
    out_footprint: str,
    seed: Optional[int] = None,
    size_preset: Optional[str] = None,
) -> int:
    """Write clean, noisy and footprint tensors for one configured condition."""
    cfg = load_run_config(config_path)
    if size_preset is not None:
        cfg = with_size_preset(cfg, size_preset)
    if seed is not None:
        cfg = cfg.model_copy(update={"noise": cfg.noise.model_copy(update={"seed": seed})})

    data = cfg.data
    clean = generate_clean(data.dims, data.events, data.dt, data.peak_freq)
    noisy, footprint, _ = add_noise(clean, cfg.noise)

    write_tensor(out_clean, clean)
    write_tensor(out_noisy, noisy)
    write_tensor(out_footprint, footprint)

    noise = cfg.noise
    emit(
        command="generate",
        dims=data.dims,
        F=noise.footprint_amplitude,
        sigma=noise.gaussian_sigma,
        seed=noise.seed,
        period=noise.footprint_period,
        decay=noise.decay_for(data.n3),
        events=len(data.events),
    )
    emit(clean=out_clean, noisy=out_noisy, footprint=out_footprint)
    return EXIT_OK


@exit_codes
def cmd_denoise(
    config_path: Optional[str],
    in_noisy: str,
    out_denoised: str,
    in_reference: Optional[str] = None,
    history_csv: Optional[str] = None,
    mode: Optional[str] = None,
    iters: Optional[int] = None,
    preset: Optional[str] = None,
) -> int:
    """
    Run the solver on a tensor file.

    With a reference, per-iteration PSNR (and SSIM when slices are large
    enough) is tracked and the final scores are printed.
    """
    cfg = load_run_config(config_path)
    solver_cfg = solver_overrides(cfg.solver, mode=mode, iters=iters, preset=preset)

    y = read_tensor(in_noisy)
    reference = None
    if in_reference is not None:
        reference = read_tensor(in_reference)
        require_same_dims(y, reference, "noisy and reference tensors")

    started = time.perf_counter()
    x_hat, history = denoise(y, solver_cfg, reference=reference, track_ssim=True)
    seconds = time.perf_counter() - started
    write_tensor(out_denoised, x_hat)

    if history_csv is not None:
        metadata = {"mode": solver_cfg.mode.value, "iters": solver_cfg.max_iters, "input": in_noisy}
        metadata.update({k: getattr(solver_cfg, k) for k in PRESET_FIELDS})
        write_history_csv(history_csv, history, metadata)

    emit(command="denoise", dims=y.shape, mode=solver_cfg.mode, iters=len(history), seconds=seconds, out=out_denoised)
    if reference is not None:
        last = history[-1]
        final_ssim = last.ssim if last.ssim is not None else float("nan")
        emit(psnr_db=last.psnr_db, ssim=final_ssim)
    return EXIT_OK


@exit_codes
def cmd_metrics(in_x: str, in_reference: str, per_slice: bool = False) -> int:
    """Print PSNR and SSIM of a tensor against a reference."""
    x = read_tensor(in_x)
    reference = read_tensor(in_reference)
    require_same_dims(x, reference, "estimate and reference tensors")

    if not metrics.ssim_supported(x.shape):
        emit(command="metrics", psnr_db=metrics.psnr(x, reference), ssim=float("nan"))
        return EXIT_OK
    report = metrics.evaluate(x, reference, per_slice=per_slice)
    emit(command="metrics", psnr_db=report.psnr_db, ssim=report.ssim)
    if per_slice:
        for k, (p, s) in enumerate(zip(report.per_slice_psnr, report.per_slice_ssim)):
            emit(slice=k, psnr_db=p, ssim=s)
    return EXIT_OK


@exit_codes
def cmd_benchmark(
    config_path: Optional[str],
    noise_grid: Optional[str],
    out_csv: str,
    modes: Sequence[str] = (),
    workers: Optional[int] = None,
) -> int:
    """Run the (mode, F, sigma) grid and write one CSV row per combination."""
    cfg = load_run_config(config_path)
    grid = parse_grid(noise_grid) if noise_grid else default_grid()
    run_modes = [Mode(m) for m in modes] or [cfg.solver.mode]

    rows = run_benchmark(cfg, grid, run_modes, workers=workers)
    write_table_csv(out_csv, rows, BENCHMARK_COLUMNS)
    for row in rows:
        emit(**{k: row[k] for k in BENCHMARK_COLUMNS})
    emit(command="benchmark", rows=len(rows), out=out_csv)
    return EXIT_OK


def parse_values(text: str) -> Tuple[float, ...]:
    """Comma-separated floats."""
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise RunConfigError(f"values {text!r} must be comma-separated numbers") from exc
    if not values:
        raise RunConfigError("at least one value is required")
    return values


@exit_codes
def cmd_sweep(
    config_path: Optional[str],
    parameter: str,
    values: str,
    out_csv: str,
    noise_grid: Optional[str] = None,
    workers: Optional[int] = None,
) -> int:
    """Vary one solver weight and write one CSV row per (value, F, sigma)."""
    cfg = load_run_config(config_path)
    grid = parse_grid(noise_grid) if noise_grid else None
    rows = run_parameter_sweep(cfg, parameter, parse_values(values), grid, workers=workers)
    write_table_csv(out_csv, rows, SWEEP_COLUMNS)
    for row in rows:
        emit(**{k: row[k] for k in SWEEP_COLUMNS})
    emit(command="sweep", rows=len(rows), out=out_csv)
    return EXIT_OK


@exit_codes
def cmd_import_raw(
    in_raw: str,
    out_tensor: str,
    dims: Tuple[int, int, int],
    dtype: str = "float32",
    byte_order: str = "little",
    normalize: bool = False,
) -> int:
    """Convert a headerless binary volume into a tensor file."""
    volume = import_raw(in_raw, dims, dtype=dtype, byte_order=byte_order)
    if normalize:
        peak = float(np.max(np.abs(volume)))
        if peak > 0:
            volume = volume / peak
    write_tensor(out_tensor, volume)
    emit(command="import-raw", dims=volume.shape, dtype=dtype, byte_order=byte_order,
         bytes=Path(out_tensor).stat().st_size, out=out_tensor)
    return EXIT_OK
