"""Format-agnostic kernels for the BLAS/LAPACK subset.

:func:`build` compiles one copy of every kernel per number format, given the
format's scalar operations. The posit and binary32 routines therefore share
traversal, blocking and per-element operation order; only the arithmetic
differs.

Per-element order is fixed so that blocking never changes results:

* gemm: ``t = 0; t += a_ik * b_kj`` for ascending k, then ``alpha*t + beta*c``.
* factorizations and triangular solves: every off-diagonal update is
  ``c -= a * b`` applied one k at a time in ascending elimination order,
  i.e. a sequence of rank-1 ``gemm(alpha=-1, beta=1)`` steps.
* divisions by the pivot (or diagonal) are direct divisions.
"""
from __future__ import annotations

from types import SimpleNamespace

import numba as nb
import numpy as np


def build(fmt: SimpleNamespace) -> SimpleNamespace:
    add = fmt.add
    sub = fmt.sub
    mul = fmt.mul
    div = fmt.div
    sqrt = fmt.sqrt
    key = fmt.key
    positive = fmt.positive
    is_zero = fmt.is_zero
    dtype = fmt.dtype
    zero = fmt.zero

    @nb.njit(nogil=True)
    def gemm(transa, transb, alpha, A, B, beta, C, mb, nb_, kb):
        m, n = C.shape
        kdim = A.shape[0] if transa else A.shape[1]
        nj = (n + nb_ - 1) // nb_
        for jt in range(nj):
            j0 = jt * nb_
            j1 = min(j0 + nb_, n)
            acc = np.empty(mb, dtype)
            for i0 in range(0, m, mb):
                i1 = min(i0 + mb, m)
                for j in range(j0, j1):
                    for i in range(i1 - i0):
                        acc[i] = zero
                    for k0 in range(0, kdim, kb):
                        k1 = min(k0 + kb, kdim)
                        for k in range(k0, k1):
                            b = B[j, k] if transb else B[k, j]
                            if transa:
                                for i in range(i0, i1):
                                    acc[i - i0] = add(acc[i - i0], mul(A[k, i], b))
                            else:
                                for i in range(i0, i1):
                                    acc[i - i0] = add(acc[i - i0], mul(A[i, k], b))
                    for i in range(i0, i1):
                        C[i, j] = add(mul(alpha, acc[i - i0]), mul(beta, C[i, j]))

    @nb.njit(nogil=True)
    def gemm_naive(transa, transb, alpha, A, B, beta, C):
        m, n = C.shape
        kdim = A.shape[0] if transa else A.shape[1]
        for i in range(m):
            for j in range(n):
                t = zero
                for k in range(kdim):
                    a = A[k, i] if transa else A[i, k]
                    b = B[j, k] if transb else B[k, j]
                    t = add(t, mul(a, b))
                C[i, j] = add(mul(alpha, t), mul(beta, C[i, j]))

    @nb.njit(nogil=True)
    def update(C, A, B, lower_from):
        """C[i, j] -= A[i, k] * B[k, j] for ascending k.

        With lower_from >= 0 only entries with i + lower_from >= j are
        touched (the lower triangle of a block whose row offset relative to
        its column offset is ``lower_from``).
        """
        m, n = C.shape
        kdim = A.shape[1]
        for j in range(n):
            i_start = 0
            if lower_from >= 0:
                i_start = max(0, j - lower_from)
            for k in range(kdim):
                b = B[k, j]
                for i in range(i_start, m):
                    C[i, j] = sub(C[i, j], mul(A[i, k], b))

    @nb.njit(nogil=True)
    def scale(alpha, B):
        m, n = B.shape
        for j in range(n):
            for i in range(m):
                B[i, j] = mul(alpha, B[i, j])

    @nb.njit(nogil=True)
    def trsm(right, upper, trans, unit, A, B):
        """Solve op(A) X = B (left) or X op(A) = B (right) in place.

        Returns 0, or the 1-based column of the first zero diagonal.
        """
        m, n = B.shape
        na = A.shape[0]
        if not unit:
            for k in range(na):
                if is_zero(A[k, k]):
                    return k + 1
        # an upper triangle read transposed acts as a lower one
        forward = (upper == trans) if not right else (upper != trans)
        if not right:
            for j in range(n):
                if forward:
                    for k in range(m):
                        if not unit:
                            B[k, j] = div(B[k, j], A[k, k])
                        xk = B[k, j]
                        for i in range(k + 1, m):
                            a = A[k, i] if trans else A[i, k]
                            B[i, j] = sub(B[i, j], mul(a, xk))
                else:
                    for k in range(m - 1, -1, -1):
                        if not unit:
                            B[k, j] = div(B[k, j], A[k, k])
                        xk = B[k, j]
                        for i in range(k):
                            a = A[k, i] if trans else A[i, k]
                            B[i, j] = sub(B[i, j], mul(a, xk))
        else:
            if forward:
                for k in range(n):
                    if not unit:
                        d = A[k, k]
                        for i in range(m):
                            B[i, k] = div(B[i, k], d)
                    for j in range(k + 1, n):
                        a = A[j, k] if trans else A[k, j]
                        for i in range(m):
                            B[i, j] = sub(B[i, j], mul(B[i, k], a))
            else:
                for k in range(n - 1, -1, -1):
                    if not unit:
                        d = A[k, k]
                        for i in range(m):
                            B[i, k] = div(B[i, k], d)
                    for j in range(k):
                        a = A[j, k] if trans else A[k, j]
                        for i in range(m):
                            B[i, j] = sub(B[i, j], mul(B[i, k], a))
        return 0

    @nb.njit(nogil=True)
    def potf2(A, k0, k1):
        """Unblocked lower Cholesky of the diagonal block A[k0:k1, k0:k1]."""
        for k in range(k0, k1):
            akk = A[k, k]
            if not positive(akk):
                return k + 1
            akk = sqrt(akk)
            A[k, k] = akk
            for i in range(k + 1, k1):
                A[i, k] = div(A[i, k], akk)
            for j in range(k + 1, k1):
                ljk = A[j, k]
                for i in range(j, k1):
                    A[i, j] = sub(A[i, j], mul(A[i, k], ljk))
        return 0

    @nb.njit(nogil=True)
    def potrf(A, block):
        n = A.shape[0]
        for k0 in range(0, n, block):
            k1 = min(k0 + block, n)
            info = potf2(A, k0, k1)
            if info:
                return info
            if k1 < n:
                trsm(True, False, True, False, A[k0:k1, k0:k1], A[k1:, k0:k1])
                update(A[k1:, k1:], A[k1:, k0:k1], A[k1:, k0:k1].T, 0)
        return 0

    @nb.njit(nogil=True)
    def swap_rows(A, r1, r2, c0, c1):
        for j in range(c0, c1):
            t = A[r1, j]
            A[r1, j] = A[r2, j]
            A[r2, j] = t

    @nb.njit(nogil=True)
    def getf2(A, k0, k1, ipiv, info):
        """Unblocked partial-pivoting LU of the panel A[k0:, k0:k1]."""
        m = A.shape[0]
        for k in range(k0, k1):
            p = k
            best = key(A[k, k])
            for i in range(k + 1, m):
                v = key(A[i, k])
                if v > best:
                    best = v
                    p = i
            ipiv[k] = p + 1
            if p != k:
                swap_rows(A, k, p, k0, k1)
            pivot = A[k, k]
            if is_zero(pivot):
                if info == 0:
                    info = k + 1
            else:
                for i in range(k + 1, m):
                    A[i, k] = div(A[i, k], pivot)
            for j in range(k + 1, k1):
                ukj = A[k, j]
                for i in range(k + 1, m):
                    A[i, j] = sub(A[i, j], mul(A[i, k], ukj))
        return info

    @nb.njit(nogil=True)
    def getrf(A, block, ipiv):
        m, n = A.shape
        mn = min(m, n)
        info = 0
        for k0 in range(0, mn, block):
            k1 = min(k0 + block, mn)
            info = getf2(A, k0, k1, ipiv, info)
            for k in range(k0, k1):
                p = ipiv[k] - 1
                if p != k:
                    swap_rows(A, k, p, 0, k0)
                    swap_rows(A, k, p, k1, n)
            if k1 < n:
                trsm(False, False, False, True, A[k0:k1, k0:k1], A[k0:k1, k1:])
                if k1 < m:
                    update(A[k1:, k1:], A[k1:, k0:k1], A[k0:k1, k1:], -1)
        return info

    @nb.njit(nogil=True)
    def laswp(B, ipiv):
        n = B.shape[1]
        for k in range(ipiv.shape[0]):
            p = ipiv[k] - 1
            if p != k:
                swap_rows(B, k, p, 0, n)

    return SimpleNamespace(gemm=gemm, gemm_naive=gemm_naive, update=update,
                           scale=scale, trsm=trsm, potf2=potf2, potrf=potrf,
                           getf2=getf2, getrf=getrf, laswp=laswp, dtype=dtype,
                           fmt=fmt)
