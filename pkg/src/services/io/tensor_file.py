"""
Binary tensor file format.

Layout (all little-endian):

    offset  size  field
    0       8     magic  b"TLSMTNS1" (format + version 1)
    8       24    dims   three uint64: n1, n2, n3
    32      1     dtype  0x01 = float64
    33      8*N   payload, C order ((i * n2 + j) * n3 + k), N = n1 * n2 * n3
"""

from pathlib import Path
from typing import Union

import numpy as np
import numpy.typing as npt

from src.tensor.core import Tensor3, as_tensor3

MAGIC = b"TLSMTNS1"
DTYPE_FLOAT64 = 1
HEADER_SIZE = len(MAGIC) + 3 * 8 + 1

PathLike = Union[str, Path]


class TensorFileError(ValueError):
    """Malformed or unsupported tensor file."""


def expected_size(dims: tuple) -> int:
    """Total file size in bytes for the given dims."""
    n1, n2, n3 = dims
    return HEADER_SIZE + 8 * n1 * n2 * n3


def encode(t: Tensor3) -> bytes:
    """Serialize a tensor to the file format."""
    t = as_tensor3(t)
    header = MAGIC + np.asarray(t.shape, dtype="<u8").tobytes() + bytes([DTYPE_FLOAT64])
    return header + np.ascontiguousarray(t, dtype="<f8").tobytes(order="C")


def decode(blob: bytes) -> Tensor3:
    """
    Parse the file format.

    Raises:
        TensorFileError: On a bad magic, dtype tag or payload length
    """
    if len(blob) < HEADER_SIZE or blob[: len(MAGIC)] != MAGIC:
        raise TensorFileError("not a TLSM tensor file (bad magic)")
    dims = tuple(int(d) for d in np.frombuffer(blob, dtype="<u8", count=3, offset=len(MAGIC)))
    if min(dims) < 1:
        raise TensorFileError(f"invalid dims {dims}")
    tag = blob[HEADER_SIZE - 1]
    if tag != DTYPE_FLOAT64:
        raise TensorFileError(f"unsupported dtype tag {tag:#04x}")
    if len(blob) != expected_size(dims):
        raise TensorFileError(f"payload is {len(blob) - HEADER_SIZE} bytes, expected {expected_size(dims) - HEADER_SIZE}")
    payload: npt.NDArray = np.frombuffer(blob, dtype="<f8", offset=HEADER_SIZE)
    return payload.astype(np.float64).reshape(dims)


def write_tensor(path: PathLike, t: Tensor3) -> None:
    """Write a tensor file."""
    Path(path).write_bytes(encode(t))


def read_tensor(path: PathLike) -> Tensor3:
    """Read a tensor file."""
    return decode(Path(path).read_bytes())


def import_raw(
    path: PathLike,
    dims: tuple,
    dtype: str = "float32",
    byte_order: str = "little",
) -> Tensor3:
    """
    Load a headerless binary volume.

    Args:
        path: Raw file
        dims: (n1, n2, n3) in C order
        dtype: "float32" or "float64"
        byte_order: "little" or "big"

    Returns:
        Tensor3

    Raises:
        TensorFileError: If the file size disagrees with dims
    """
    if dtype not in ("float32", "float64"):
        raise TensorFileError(f"unsupported raw dtype {dtype!r}")
    if byte_order not in ("little", "big"):
        raise TensorFileError(f"unsupported byte order {byte_order!r}")
    np_dtype = np.dtype(dtype).newbyteorder("<" if byte_order == "little" else ">")
    blob = Path(path).read_bytes()
    count = int(np.prod(dims))
    if len(blob) != count * np_dtype.itemsize:
        raise TensorFileError(f"raw file has {len(blob)} bytes, expected {count * np_dtype.itemsize} for dims {dims}")
    return as_tensor3(np.frombuffer(blob, dtype=np_dtype).astype(np.float64).reshape(dims), "raw volume")
