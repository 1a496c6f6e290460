#!/usr/bin/env python3
"""
TLSM Seismic Denoising - Main Application

Command-line entry point. Generates synthetic seismic volumes, denoises them
with the TLSM ADMM solver, scores results and runs benchmark grids and
parameter sweeps. See ``src/services/commands.py`` for exit codes and the
``tlsm:`` summary line format.
"""

import sys

import click

from config import setup_logging
from src.admm.state import PARAMETER_PRESETS, Mode
from src.data.synthetic import SIZE_PRESETS
from src.services import commands

MODE_CHOICE = click.Choice([m.value for m in Mode])


@click.group()
@click.option("--log-level", default=None, help="Override TLSM_LOG_LEVEL (DEBUG, INFO, ...)")
def main(log_level):
    """TLSM denoising of 3-D seismic volumes."""
    setup_logging(log_level)


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None, help="Run config file")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".", show_default=True,
              help="Directory for clean.tns, noisy.tns and footprint.tns")
@click.option("--seed", type=int, default=None, help="Override the noise seed")
@click.option("--size-preset", type=click.Choice(sorted(SIZE_PRESETS)), default=None,
              help="Override the volume size")
def generate(config_path, out_dir, seed, size_preset):
    """Write a clean volume, its noisy observation and the footprint."""
    out = click.format_filename(out_dir)
    sys.exit(commands.cmd_generate(
        config_path,
        f"{out}/clean.tns",
        f"{out}/noisy.tns",
        f"{out}/footprint.tns",
        seed=seed,
        size_preset=size_preset,
    ))


@main.command()
@click.argument("noisy", type=click.Path())
@click.option("--config", "config_path", type=click.Path(), default=None, help="Run config file")
@click.option("--out", "out_path", type=click.Path(), required=True, help="Denoised tensor file")
@click.option("--reference", type=click.Path(), default=None, help="Clean tensor for PSNR/SSIM")
@click.option("--history", "history_csv", type=click.Path(), default=None, help="Per-iteration CSV")
@click.option("--mode", type=MODE_CHOICE, default=None, help="Override the solver mode")
@click.option("--iters", type=click.IntRange(min=1), default=None, help="Override the iteration count")
@click.option("--preset", type=click.Choice(sorted(PARAMETER_PRESETS)), default=None,
              help="Use a named parameter preset")
def denoise(noisy, config_path, out_path, reference, history_csv, mode, iters, preset):
    """Denoise a tensor file."""
    sys.exit(commands.cmd_denoise(
        config_path, noisy, out_path,
        in_reference=reference, history_csv=history_csv, mode=mode, iters=iters, preset=preset,
    ))


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None, help="Run config file")
@click.option("--grid", default=None, help="Noise grid 'F1,F2xS1,S2'; the 3x4 grid when omitted")
@click.option("--mode", "modes", type=MODE_CHOICE, multiple=True, help="Mode to run (repeatable)")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Override TLSM_WORKERS")
@click.option("--out", "out_csv", type=click.Path(), required=True, help="Result CSV")
def benchmark(config_path, grid, modes, workers, out_csv):
    """Score every (mode, F, sigma) combination."""
    sys.exit(commands.cmd_benchmark(config_path, grid, out_csv, modes=modes, workers=workers))


@main.command()
@click.argument("estimate", type=click.Path())
@click.argument("reference", type=click.Path())
@click.option("--per-slice", is_flag=True, help="Also print per-frontal-slice values")
def metrics(estimate, reference, per_slice):
    """Print PSNR and SSIM of ESTIMATE against REFERENCE."""
    sys.exit(commands.cmd_metrics(estimate, reference, per_slice=per_slice))


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None, help="Run config file")
@click.option("--parameter", required=True, help="One of a, b, c, tau, lambda1, lambda2")
@click.option("--values", required=True, help="Comma-separated values")
@click.option("--grid", default=None, help="Noise grid; the configured condition when omitted")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Override TLSM_WORKERS")
@click.option("--out", "out_csv", type=click.Path(), required=True, help="Result CSV")
def sweep(config_path, parameter, values, grid, workers, out_csv):
    """Vary one solver weight with the others fixed."""
    sys.exit(commands.cmd_sweep(config_path, parameter, values, out_csv, noise_grid=grid, workers=workers))


@main.command("import-raw")
@click.argument("raw", type=click.Path())
@click.option("--dims", nargs=3, type=click.IntRange(min=1), required=True, help="n1 n2 n3")
@click.option("--dtype", type=click.Choice(["float32", "float64"]), default="float32", show_default=True)
@click.option("--byte-order", type=click.Choice(["little", "big"]), default="little", show_default=True)
@click.option("--normalize", is_flag=True, help="Scale to max |entry| = 1")
@click.option("--out", "out_path", type=click.Path(), required=True, help="Tensor file")
def import_raw(raw, dims, dtype, byte_order, normalize, out_path):
    """Convert a headerless binary volume into a tensor file."""
    sys.exit(commands.cmd_import_raw(raw, out_path, tuple(dims), dtype=dtype, byte_order=byte_order,
                                     normalize=normalize))


if __name__ == "__main__":
    main()
