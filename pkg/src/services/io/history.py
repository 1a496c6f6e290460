"""
CSV outputs for plotting.

history:   iter, psnr_db, ssim, res_z, res_d1, res_d2   (preceded by '# key=value' metadata lines)
benchmark: mode, F, sigma, psnr_db, ssim, seconds
sweep:     parameter, value, F, sigma, psnr_db, ssim
"""

from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd

from src.admm.state import IterationRecord

HISTORY_COLUMNS = ["iter", "psnr_db", "ssim", "res_z", "res_d1", "res_d2"]
BENCHMARK_COLUMNS = ["mode", "F", "sigma", "psnr_db", "ssim", "seconds"]
SWEEP_COLUMNS = ["parameter", "value", "F", "sigma", "psnr_db", "ssim"]


def history_frame(history: List[IterationRecord]) -> pd.DataFrame:
    """Per-iteration table in the fixed column order."""
    rows = [record.model_dump() for record in history]
    return pd.DataFrame(rows, columns=list(IterationRecord.model_fields))[HISTORY_COLUMNS]


def write_history_csv(
    path: Union[str, Path],
    history: List[IterationRecord],
    metadata: Optional[Dict[str, object]] = None,
) -> None:
    """Write a history CSV with optional '# key=value' header lines."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        for key, value in (metadata or {}).items():
            handle.write(f"# {key}={value}\n")
        history_frame(history).to_csv(handle, index=False, float_format="%.10g")


def read_history_csv(path: Union[str, Path]) -> pd.DataFrame:
    """Read a history CSV, skipping metadata lines."""
    return pd.read_csv(path, comment="#")


def read_csv_metadata(path: Union[str, Path]) -> Dict[str, str]:
    """Collect the '# key=value' header lines of a CSV."""
    meta = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
    return meta


def write_table_csv(path: Union[str, Path], rows: List[dict], columns: List[str]) -> pd.DataFrame:
    """Write rows in a fixed column order and return the frame."""
    frame = pd.DataFrame(rows, columns=columns)
    frame.to_csv(path, index=False, float_format="%.10g")
    return frame
