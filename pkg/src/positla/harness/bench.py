"""GEMM / factorization timing with exact flop accounting."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..linalg import matrix as mx
from ..linalg import routines as rt
from ..posit import core
from ..posit.kernels import ONE
from .experiments import gen_normal, make_spd
from .rng import Rng

KERNELS = ("gemm_square", "gemm_trailing", "potrf", "getrf")
COUNTER_SIGMAS = (1e-2, 1.0, 1e6)


@dataclass(frozen=True)
class BenchRecord:
    kernel: str
    N: int
    K: int
    sigma: float
    ops: float
    seconds: float
    gflops: float


def flop_count(kernel: str, N: int, K: int | None = None) -> float:
    if kernel == "gemm_square":
        return 2.0 * N ** 3
    if kernel == "gemm_trailing":
        if K is None:
            raise ValueError("gemm_trailing needs K")
        return 2.0 * N * N * K
    if kernel == "potrf":
        return N ** 3 / 3.0
    if kernel == "getrf":
        return 2.0 * N ** 3 / 3.0
    raise ValueError(f"unknown kernel {kernel!r}")


def _record(kernel: str, N: int, K: int, sigma: float, seconds: float) -> BenchRecord:
    ops = flop_count(kernel, N, K)
    gflops = ops / seconds * 1e-9 if seconds > 0 else float("inf")
    return BenchRecord(kernel, N, K, sigma, ops, seconds, gflops)


def gemm_bench(mode: str, N: int, K: int | None, sigma: float, rng: Rng,
               block: int = rt.DEFAULT_BLOCK, threads: int = 1) -> BenchRecord:
    """Time C = A B in posit; trailing mode uses an N x K by K x N product."""
    if mode not in ("square", "trailing"):
        raise ValueError("mode must be 'square' or 'trailing'")
    K = N if mode == "square" else K
    if K is None or K < 1 or N < 1:
        raise ValueError("dimensions must be positive")
    A = mx.to_posit(gen_normal(rng, N, K, sigma))
    B = mx.to_posit(gen_normal(rng, K, N, sigma))
    C = np.zeros((N, N), dtype=np.uint32, order="F")
    # warm the compiled path outside the timed region; 1x1 would type as C-layout
    w = np.zeros((2, 2), dtype=np.uint32, order="F")
    rt.rgemm("N", "N", ONE, w, w.copy(order="F"), 0, w.copy(order="F"), block, threads)
    t0 = time.perf_counter()
    rt.rgemm("N", "N", ONE, A, B, 0, C, block, threads)
    return _record(f"gemm_{mode}", N, K, sigma, time.perf_counter() - t0)


def factor_bench(kernel: str, N: int, sigma: float, rng: Rng,
                 block: int = rt.DEFAULT_BLOCK) -> BenchRecord:
    X = gen_normal(rng, N, N, sigma)
    if kernel == "potrf":
        P = mx.to_posit(make_spd(X))
        rt.rpotrf(mx.to_posit(np.asfortranarray(np.eye(3))))
        t0 = time.perf_counter()
        rt.rpotrf(P, block)
    elif kernel == "getrf":
        P = mx.to_posit(X)
        rt.rgetrf(mx.to_posit(np.asfortranarray(np.eye(3))))
        t0 = time.perf_counter()
        rt.rgetrf(P, block)
    else:
        raise ValueError("kernel must be 'potrf' or 'getrf'")
    return _record(kernel, N, N, sigma, time.perf_counter() - t0)


def counted_gemm(A: np.ndarray, B: np.ndarray, counters: core.OpCounters | None = None):
    """Reference A @ B through the instrumented scalar ops.

    Returns (C, n_ops) where n_ops counts every multiply and add in the
    inner products. Same per-element order as rgemm.
    """
    m, k = A.shape
    n = B.shape[1]
    C = np.zeros((m, n), dtype=np.uint32)
    n_ops = 0
    for j in range(n):
        for i in range(m):
            t = 0
            for kk in range(k):
                prod = core.mul(int(A[i, kk]), int(B[kk, j]), counters=counters)
                t = core.add(t, prod, counters=counters)
                n_ops += 2
            C[i, j] = t
    return C, n_ops


def gemm_counter_profile(N: int, K: int, sigma: float, rng: Rng) -> float:
    """Mean total_steps per scalar op of an N x K by K x N posit product."""
    A = mx.to_posit(gen_normal(rng, N, K, sigma))
    B = mx.to_posit(gen_normal(rng, K, N, sigma))
    c = core.OpCounters()
    _, n_ops = counted_gemm(A, B, c)
    return c.total_steps / n_ops
