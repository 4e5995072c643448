"""BLAS/LAPACK-style routines for Posit(32,2) (``r*``) and binary32 (``s*``).

Matrices are 2-D numpy arrays, posit matrices holding 32-bit patterns as
``uint32``; column-major (Fortran-ordered) storage is the fast path but any
layout works. Pivot vectors are 1-based, and ``info`` follows LAPACK: 0 on
success, ``k > 0`` naming the failing column.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from types import SimpleNamespace

import numpy as np

from ..posit.core import Posit32
from . import _generic
from .formats import BINARY32, POSIT

DEFAULT_BLOCK = 64


class LinalgError(ValueError):
    pass


class DimensionError(LinalgError):
    """Operand shapes do not conform."""


class SingularMatrixError(LinalgError):
    """A triangular factor has an exact zero on its diagonal."""

    def __init__(self, column: int):
        super().__init__(f"zero diagonal element in column {column}")
        self.column = column


def _flag(value, allowed: str, name: str) -> str:
    v = str(value).upper()[:1]
    if v not in allowed:
        raise ValueError(f"{name} must be one of {tuple(allowed)}, got {value!r}")
    return v


class Routines:
    """One number format's routine set; kernels compile on first use."""

    def __init__(self, fmt: SimpleNamespace):
        self.fmt = fmt
        self._k = None

    @property
    def kernels(self) -> SimpleNamespace:
        if self._k is None:
            self._k = _generic.build(self.fmt)
        return self._k

    def scalar(self, x):
        if self.fmt is POSIT:
            if isinstance(x, Posit32):
                return np.uint32(x.bits)
            if isinstance(x, (int, np.integer)):
                return np.uint32(int(x) & 0xFFFFFFFF)
            raise TypeError("posit scalars are Posit32 or integer patterns")
        return self.fmt.dtype(x)

    def _check(self, *arrays: np.ndarray) -> None:
        for a in arrays:
            if not isinstance(a, np.ndarray) or a.ndim != 2:
                raise DimensionError("operands must be 2-D arrays")
            if a.dtype != self.fmt.dtype:
                raise TypeError(f"expected {np.dtype(self.fmt.dtype)} elements, got {a.dtype}")

    def _check_finite(self, A: np.ndarray) -> None:
        if self.fmt is POSIT:
            bad = A == np.uint32(0x80000000)
        else:
            bad = ~np.isfinite(A)
        if bad.any():
            raise LinalgError("factorization input contains NaR/non-finite entries")

    def gemm(self, transa, transb, alpha, A, B, beta, C, block: int = DEFAULT_BLOCK,
             threads: int = 1):
        """C <- alpha * op(A) @ op(B) + beta * C, in place; returns C.

        With ``threads > 1`` disjoint column tiles of C are computed by
        separate workers; per-element operation order is unchanged.
        """
        ta = _flag(transa, "NT", "transa") == "T"
        tb = _flag(transb, "NT", "transb") == "T"
        self._check(A, B, C)
        m, k = (A.shape[1], A.shape[0]) if ta else A.shape
        kb, n = (B.shape[1], B.shape[0]) if tb else B.shape
        if k != kb or C.shape != (m, n):
            raise DimensionError(
                f"cannot form {C.shape} from op(A) {m}x{k} and op(B) {kb}x{n}")
        if block < 1:
            raise ValueError("block must be >= 1")
        al, be = self.scalar(alpha), self.scalar(beta)
        kern = self.kernels.gemm
        if threads <= 1 or n <= block:
            kern(ta, tb, al, A, B, be, C, block, block, block)
            return C
        tiles = [(j, min(j + block, n)) for j in range(0, n, block)]

        def run(span):
            j0, j1 = span
            Bs = B[j0:j1, :] if tb else B[:, j0:j1]
            kern(ta, tb, al, A, Bs, be, C[:, j0:j1], block, block, block)

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, tiles))
        return C

    def gemm_naive(self, transa, transb, alpha, A, B, beta, C):
        """Unblocked triple loop with the same per-element order as gemm."""
        ta = _flag(transa, "NT", "transa") == "T"
        tb = _flag(transb, "NT", "transb") == "T"
        self._check(A, B, C)
        self.kernels.gemm_naive(ta, tb, self.scalar(alpha), A, B, self.scalar(beta), C)
        return C

    def trsm(self, side, uplo, trans, diag, alpha, A, B):
        """Solve op(A) X = alpha B (side L) or X op(A) = alpha B (side R) in place."""
        right = _flag(side, "LR", "side") == "R"
        upper = _flag(uplo, "LU", "uplo") == "U"
        tr = _flag(trans, "NT", "trans") == "T"
        unit = _flag(diag, "UN", "diag") == "U"
        self._check(A, B)
        na = B.shape[1] if right else B.shape[0]
        if A.shape != (na, na):
            raise DimensionError(f"triangular factor {A.shape} does not fit B {B.shape}")
        self.kernels.scale(self.scalar(alpha), B)
        col = self.kernels.trsm(right, upper, tr, unit, A, B)
        if col:
            raise SingularMatrixError(int(col))
        return B

    def potrf(self, A, block: int = DEFAULT_BLOCK) -> int:
        """Lower Cholesky factor overwrites the lower triangle of A; returns info."""
        self._check(A)
        if A.shape[0] != A.shape[1]:
            raise DimensionError("potrf needs a square matrix")
        if block < 1:
            raise ValueError("block must be >= 1")
        self._check_finite(np.tril(A))
        return int(self.kernels.potrf(A, block))

    def getrf(self, A, block: int = DEFAULT_BLOCK):
        """P A = L U in place (unit L below the diagonal); returns (ipiv, info)."""
        self._check(A)
        if block < 1:
            raise ValueError("block must be >= 1")
        self._check_finite(A)
        ipiv = np.zeros(min(A.shape), dtype=np.int64)
        info = self.kernels.getrf(A, block, ipiv)
        return ipiv, int(info)

    def potrs(self, L, b):
        """Solve (L L^T) x = b from a potrf factor; returns a new array."""
        self._check(L, b)
        if L.shape[0] != L.shape[1] or b.shape[0] != L.shape[0]:
            raise DimensionError("right-hand side does not conform to the factor")
        x = np.array(b, order="F", copy=True)
        one = self.fmt.one
        self.trsm("L", "L", "N", "N", one, L, x)
        self.trsm("L", "L", "T", "N", one, L, x)
        return x

    def getrs(self, LU, ipiv, b):
        """Solve A x = b from getrf output; returns a new array."""
        self._check(LU, b)
        if LU.shape[0] != LU.shape[1] or b.shape[0] != LU.shape[0]:
            raise DimensionError("right-hand side does not conform to the factor")
        ipiv = np.asarray(ipiv, dtype=np.int64)
        if ipiv.shape != (LU.shape[0],) or ipiv.min(initial=1) < 1 or ipiv.max(initial=1) > LU.shape[0]:
            raise DimensionError("pivot vector out of range")
        x = np.array(b, order="F", copy=True)
        self.kernels.laswp(x, ipiv)
        one = self.fmt.one
        self.trsm("L", "L", "N", "U", one, LU, x)
        self.trsm("L", "U", "N", "N", one, LU, x)
        return x


posit_routines = Routines(POSIT)
binary32_routines = Routines(BINARY32)

rgemm = posit_routines.gemm
rtrsm = posit_routines.trsm
rpotrf = posit_routines.potrf
rgetrf = posit_routines.getrf
rpotrs = posit_routines.potrs
rgetrs = posit_routines.getrs

sgemm = binary32_routines.gemm
strsm = binary32_routines.trsm
spotrf = binary32_routines.potrf
sgetrf = binary32_routines.getrf
spotrs = binary32_routines.potrs
sgetrs = binary32_routines.getrs
