"""Operand-range cost profile of the posit pipeline.

Counters from the instrumented reference implementation stand in for GPU
instruction counts; wall time of the compiled kernels is recorded but is
not part of any claim.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..posit import core
from ..posit import kernels as pk
from .rng import Rng

OPS = ("add", "mul", "div", "sqrt")
MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class RangeSpec:
    label: str
    a: float
    b: float

    def __post_init__(self) -> None:
        if not 0 < self.a < self.b:
            raise ValueError("range needs 0 < a < b")


RANGES = {
    "I0": RangeSpec("I0", 1.0, 2.0),
    "I1": RangeSpec("I1", 1e-38, 1e-30),
    "I2": RangeSpec("I2", 1e30, 1e38),
    "I3": RangeSpec("I3", 1e-15, 1e-14),
    "I4": RangeSpec("I4", 1e14, 1e15),
}


@dataclass(frozen=True)
class CounterSummary:
    op: str
    range: str
    samples: int
    mean_regime_iters: float
    mean_norm_shifts: float
    mean_total_steps: float
    var_total_steps: float
    wall_ns_per_op: float


_REF = {"add": core.add, "mul": core.mul, "div": core.div}
_FAST = {"add": pk.add_u, "mul": pk.mul_u, "div": pk.div_u}


def profile_operands(op: str, p: np.ndarray, q: np.ndarray | None) -> np.ndarray:
    """Per-sample (regime_iters, norm_shifts) for the reference pipeline."""
    out = np.empty((len(p), 2), dtype=np.int64)
    for i in range(len(p)):
        c = core.OpCounters()
        if op == "sqrt":
            core.sqrt(int(p[i]), counters=c)
        else:
            _REF[op](int(p[i]), int(q[i]), counters=c)
        out[i] = c.regime_iters, c.norm_shifts
    return out


def _wall_ns(op: str, p: np.ndarray, q: np.ndarray | None) -> float:
    fn = pk.sqrt_u if op == "sqrt" else _FAST[op]
    args = (p,) if op == "sqrt" else (p, q)
    fn(*(a[:1] for a in args))
    t0 = time.perf_counter_ns()
    fn(*args)
    return (time.perf_counter_ns() - t0) / len(p)


def summarize(op: str, label: str, p: np.ndarray, q: np.ndarray | None,
              timing: bool = True) -> CounterSummary:
    counts = profile_operands(op, p, q)
    total = counts.sum(axis=1)
    return CounterSummary(
        op=op, range=label, samples=len(p),
        mean_regime_iters=float(counts[:, 0].mean()),
        mean_norm_shifts=float(counts[:, 1].mean()),
        mean_total_steps=float(total.mean()),
        var_total_steps=float(total.var()),
        wall_ns_per_op=_wall_ns(op, p, q) if timing else float("nan"),
    )


def range_microbench(spec: RangeSpec, op: str, samples: int, rng: Rng,
                     timing: bool = True) -> CounterSummary:
    """Draw operands log-uniformly from [a, b) and profile ``op`` on them."""
    if op not in OPS:
        raise ValueError(f"op must be one of {OPS}")
    if samples < MIN_SAMPLES:
        raise ValueError(f"samples must be >= {MIN_SAMPLES}")
    p = pk.from_f64_u(rng.log_uniform(spec.a, spec.b, samples))
    q = None if op == "sqrt" else pk.from_f64_u(rng.log_uniform(spec.a, spec.b, samples))
    return summarize(op, spec.label, p, q, timing)
