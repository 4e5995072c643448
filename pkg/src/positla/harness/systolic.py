"""Analytic throughput model of a square systolic GEMM array.

Peak rate is two flops per PE per cycle. Utilization uses a simple
fill/drain picture: each pass streams K useful operand pairs through a
row of ``n_rows`` PEs, each adding ``pe_latency`` cycles of pipeline
depth, so a pass takes ``K + n_rows * pe_latency`` cycles of which K do
useful work.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SystolicEstimate:
    n_pe: int
    peak_gflops: float
    fill_cycles: int
    predicted_utilization: float
    predicted_gflops: float


def peak_gflops(n_pe: int, fmax_mhz: float) -> float:
    return 2.0 * n_pe * fmax_mhz * 1e-3


def systolic_model(n_rows: int, n_cols: int, pe_latency: int, fmax_mhz: float,
                   N: int, K: int) -> SystolicEstimate:
    if min(n_rows, n_cols, pe_latency, N, K) <= 0 or fmax_mhz <= 0:
        raise ValueError("all model parameters must be positive")
    n_pe = n_rows * n_cols
    peak = peak_gflops(n_pe, fmax_mhz)
    fill = n_rows * pe_latency
    util = K / (K + fill)
    return SystolicEstimate(n_pe, peak, fill, util, peak * util)
