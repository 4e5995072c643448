"""Built-in conformance suites behind ``positla selftest``.

Each suite returns a list of failure dicts; an empty list means pass.
The implementation under test is injectable so a deliberately broken
build can be shown to fail.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from types import SimpleNamespace
from typing import Callable

import numpy as np

from .posit import core, oracle
from .posit import kernels as pk
from .posit.config import PositConfig
from .harness.microbench import RANGES
from .harness.rng import Rng

N_PATTERNS = 1 << 32
SMALL = PositConfig(8, 2)


def default_impl() -> SimpleNamespace:
    return SimpleNamespace(
        scalar={"add": core.add, "mul": core.mul, "div": core.div, "sqrt": core.sqrt},
        vector={"add": pk.add_u, "mul": pk.mul_u, "div": pk.div_u, "sqrt": pk.sqrt_u},
        from_f64=pk.from_f64_u,
        to_f64=pk.to_f64_u,
        roundtrip_failures=pk.count_roundtrip_failures,
    )


@dataclass
class SuiteResult:
    name: str
    checked: int
    seconds: float
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _fail(suite: str, detail: str, **kw) -> dict:
    return {"suite": suite, "detail": detail, **{k: (hex(v) if isinstance(v, int) else v)
                                                  for k, v in kw.items()}}


def roundtrip_sampled(impl, slices: int = 64, width: int = 1 << 16) -> tuple[int, list]:
    """Decode/encode identity on evenly spread windows of the pattern space."""
    fails, n = [], 0
    step = N_PATTERNS // slices
    for s in range(slices):
        start = s * step
        bad = impl.roundtrip_failures(start, start + width)
        n += width
        if bad:
            fails.append(_fail("roundtrip", f"{bad} failures", start=start))
    return n, fails


def roundtrip_exhaustive(impl, chunk: int = 1 << 26) -> tuple[int, list]:
    fails = []
    for start in range(0, N_PATTERNS, chunk):
        bad = impl.roundtrip_failures(start, start + chunk)
        if bad:
            fails.append(_fail("roundtrip", f"{bad} failures", start=start))
    return N_PATTERNS, fails


def ordering(impl, samples: int = 200_000, seed: int = 7) -> tuple[int, list]:
    """Signed-integer order of patterns must match real order."""
    rng = Rng(seed)
    pats = (rng.raw(samples) & np.uint64(0xFFFFFFFF)).astype(np.uint32)
    pats = pats[pats != core.POSIT32.nar]
    order = np.argsort(pats.view(np.int32), kind="stable")
    vals = impl.to_f64(pats[order])
    fails = []
    bad = np.flatnonzero(np.diff(vals) < 0)
    if bad.size:
        fails.append(_fail("ordering", f"{bad.size} inversions", first=int(pats[order][bad[0]])))
    back = impl.from_f64(vals)
    if not np.array_equal(back, pats[order]):
        i = int(np.flatnonzero(back != pats[order])[0])
        fails.append(_fail("ordering", "to_f64/from_f64 not inverse", pattern=int(pats[order][i])))
    return len(pats), fails


def oracle_sampled(impl, pairs: int = 100_000, seed: int = 11) -> tuple[int, list]:
    """Compiled ops against the error-free-transform oracle on each range."""
    rounder = oracle.LatticeRounder()
    fails, n = [], 0
    for (label, spec), op in itertools.product(RANGES.items(), ("add", "mul", "div", "sqrt")):
        rng = Rng(seed)
        p = impl.from_f64(rng.log_uniform(spec.a, spec.b, pairs))
        sign = np.where(rng.uniform(pairs) < 0.5, -1.0, 1.0)
        q = impl.from_f64(sign * rng.log_uniform(spec.a, spec.b, pairs))
        if op == "sqrt":
            got, want = impl.vector[op](p), oracle.eft_op(rounder, op, p)
        else:
            got, want = impl.vector[op](p, q), oracle.eft_op(rounder, op, p, q)
        n += pairs
        bad = np.flatnonzero(got.astype(np.uint32) != want)
        if bad.size:
            i = int(bad[0])
            fails.append(_fail("oracle", f"{op} {label}: {bad.size} mismatches",
                               p=int(p[i]), q=int(q[i]), got=int(got[i]), want=int(want[i])))
    return n, fails


def small_width(impl, exhaustive: bool = False, samples: int = 10_000, seed: int = 3,
                cfg: PositConfig = SMALL) -> tuple[int, list]:
    """Reference ops at a narrow width against the exact rational oracle."""
    n_pat = 1 << cfg.nbits
    if exhaustive:
        pairs = itertools.product(range(n_pat), repeat=2)
    else:
        raw = Rng(seed).raw(2 * samples) & np.uint64(n_pat - 1)
        pairs = zip(raw[0::2].tolist(), raw[1::2].tolist())
    fails, n = [], 0
    counts: dict[str, int] = {}
    for p, q in pairs:
        for op in ("add", "mul", "div"):
            got = impl.scalar[op](p, q, cfg)
            want = oracle.exact_op(op, p, q, cfg.nbits, cfg.es)
            n += 1
            if got != want:
                counts[op] = counts.get(op, 0) + 1
                if counts[op] == 1:
                    fails.append(_fail("small_width", f"{op} mismatch", p=p, q=q, got=got, want=want))
    sqrt_src = range(n_pat) if exhaustive else range(0, n_pat, max(1, n_pat // 256))
    for p in sqrt_src:
        got = impl.scalar["sqrt"](p, cfg)
        want = oracle.exact_op("sqrt", p, None, cfg.nbits, cfg.es)
        n += 1
        if got != want:
            counts["sqrt"] = counts.get("sqrt", 0) + 1
            if counts["sqrt"] == 1:
                fails.append(_fail("small_width", "sqrt mismatch", p=p, got=got, want=want))
    for f in fails:
        op = f["detail"].split()[0]
        f["count"] = counts[op]
    return n, fails


def run_selftest(long: bool = False, impl=None,
                 log: Callable[[str], None] | None = None) -> list[SuiteResult]:
    impl = impl or default_impl()
    suites = [
        ("roundtrip", (lambda: roundtrip_exhaustive(impl)) if long else (lambda: roundtrip_sampled(impl))),
        ("ordering", lambda: ordering(impl)),
        ("oracle", lambda: oracle_sampled(impl)),
        ("small_width", lambda: small_width(impl, exhaustive=long)),
    ]
    results = []
    for name, fn in suites:
        t0 = time.perf_counter()
        n, fails = fn()
        r = SuiteResult(name, n, time.perf_counter() - t0, fails)
        results.append(r)
        if log:
            log(f"{name}: {'ok' if r.ok else 'FAIL'} checked={n} ({r.seconds:.1f}s)")
    return results
