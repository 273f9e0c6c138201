"""Bit-exact binary tensor files.

Layout: magic "LDT1" | dtype byte (0 = f64, 1 = f32) | ndim byte |
ndim little-endian u64 extents | row-major little-endian scalars.
Little-endian regardless of host; no compression, no padding.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import DataError, FormatError
from .tensor import SUPPORTED_DTYPES, check_finite

MAGIC = b"LDT1"

_DTYPE_BYTE = {np.dtype(np.float64): 0, np.dtype(np.float32): 1}
_BYTE_DTYPE = {0: np.dtype("<f8"), 1: np.dtype("<f4")}


def write_tensor(t: np.ndarray, path) -> None:
    if t.dtype not in _DTYPE_BYTE:
        raise FormatError(f"unsupported dtype {t.dtype} (need float32 or float64)")
    if t.size == 0:
        raise FormatError(f"refusing to write an empty tensor (dims {t.shape})")
    header = MAGIC + bytes([_DTYPE_BYTE[t.dtype], t.ndim])
    header += b"".join(struct.pack("<Q", dim) for dim in t.shape)
    payload = np.ascontiguousarray(t).astype(t.dtype.newbyteorder("<"), copy=False).tobytes()
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(payload)
    except OSError as exc:
        raise FormatError(f"cannot write tensor file {path}: {exc}") from exc


def read_tensor(path) -> np.ndarray:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read tensor file {path}: {exc}") from exc
    if len(raw) < 6 or raw[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic {raw[:4]!r} (expected {MAGIC!r})")
    dtype_byte, ndim = raw[4], raw[5]
    if dtype_byte not in _BYTE_DTYPE:
        raise FormatError(f"{path}: unknown dtype byte {dtype_byte}")
    dtype = _BYTE_DTYPE[dtype_byte]
    offset = 6 + 8 * ndim
    if len(raw) < offset:
        raise FormatError(f"{path}: truncated header ({len(raw)} bytes, expected at least {offset})")
    dims = struct.unpack(f"<{ndim}Q", raw[6:offset])
    count = 1
    for dim in dims:
        count *= dim
    expected = offset + count * dtype.itemsize
    if len(raw) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for dims {dims}, got {len(raw)}")
    arr = np.frombuffer(raw[offset:], dtype=dtype).reshape(dims)
    arr = arr.astype(arr.dtype.newbyteorder("="), copy=True)
    if arr.dtype.type not in SUPPORTED_DTYPES:  # pragma: no cover - dtype map is closed
        raise FormatError(f"{path}: unsupported dtype after decode")
    try:
        check_finite(arr, f"tensor file {path}")
    except DataError:
        raise
    return arr
