"""Matrix conversions and the PMAT1 container format.

PMAT1 layout (all integers little-endian)::

    5 bytes   magic b"PMAT1"
    1 byte    element kind: 0 = posit32, 1 = f32, 2 = f64
    8 bytes   rows (uint64)
    8 bytes   cols (uint64)
    ...       rows*cols elements, column-major; posit32 as its 32-bit pattern
"""
from __future__ import annotations

import os
import struct

import numpy as np

from ..posit import kernels as pk

MAGIC = b"PMAT1"
KINDS = {"posit32": (0, np.dtype("<u4")), "f32": (1, np.dtype("<f4")),
         "f64": (2, np.dtype("<f8"))}
_BY_CODE = {code: (name, dt) for name, (code, dt) in KINDS.items()}
_DTYPE_KIND = {np.dtype(np.uint32): "posit32", np.dtype(np.float32): "f32",
               np.dtype(np.float64): "f64"}


class MatrixFormatError(ValueError):
    pass


def to_posit(D: np.ndarray) -> np.ndarray:
    """Round a binary64 array elementwise to Posit(32,2) patterns."""
    return np.asfortranarray(pk.from_f64_u(np.asarray(D, dtype=np.float64)))


def posit_to_f64(P: np.ndarray) -> np.ndarray:
    return np.asfortranarray(pk.to_f64_u(np.asarray(P, dtype=np.uint32)))


def to_binary32(D: np.ndarray) -> np.ndarray:
    return np.asfortranarray(np.asarray(D, dtype=np.float64).astype(np.float32))


def kind_of(a: np.ndarray) -> str:
    try:
        return _DTYPE_KIND[a.dtype]
    except KeyError:
        raise MatrixFormatError(f"no PMAT1 kind for dtype {a.dtype}") from None


def save_matrix(path: str | os.PathLike, a: np.ndarray, kind: str | None = None) -> None:
    a = np.atleast_2d(np.asarray(a))
    if a.ndim != 2:
        raise MatrixFormatError("only 2-D matrices can be stored")
    kind = kind or kind_of(a)
    code, dt = KINDS[kind]
    rows, cols = a.shape
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<BQQ", code, rows, cols))
        fh.write(np.asarray(a, dtype=dt).tobytes(order="F"))


def load_matrix(path: str | os.PathLike) -> tuple[str, np.ndarray]:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:5] != MAGIC:
        raise MatrixFormatError("bad magic")
    if len(raw) < 22:
        raise MatrixFormatError("truncated header")
    code, rows, cols = struct.unpack_from("<BQQ", raw, 5)
    if code not in _BY_CODE:
        raise MatrixFormatError(f"unknown element kind {code}")
    name, dt = _BY_CODE[code]
    need = rows * cols * dt.itemsize
    body = raw[22:]
    if len(body) != need:
        raise MatrixFormatError(f"expected {need} payload bytes, found {len(body)}")
    data = np.frombuffer(body, dtype=dt).reshape((rows, cols), order="F")
    return name, np.asfortranarray(data.astype(dt.newbyteorder("=")))
