"""Independent rounding oracles for checking the posit implementations.

Nothing here calls :mod:`positla.posit.core` or the kernels. Pattern values
come from a character-level parse of the bit string, and rounding is done
by locating an exact result on the posit lattice:

* :func:`round_exact` rounds a :class:`fractions.Fraction` by bisection over
  the monotone pattern order, comparing against the value of the one-bit
  longer pattern ``2p + 1`` (the encoding midpoint).
* :class:`LatticeRounder` does the same for numpy arrays of binary64 values
  carrying the sign of a residual, which is all that is needed when the
  exact result is known as an unevaluated sum ``hi + lo`` (error-free
  transformations) or as ``q`` plus the sign of a remainder.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np


def pattern_value(bits: int, nbits: int = 32, es: int = 2) -> Fraction | None:
    """Exact value of a posit pattern, or None for NaR."""
    s = format(bits & ((1 << nbits) - 1), f"0{nbits}b")
    if s == "0" * nbits:
        return Fraction(0)
    if s == "1" + "0" * (nbits - 1):
        return None
    negative = s[0] == "1"
    if negative:
        s = format((1 << nbits) - int(s, 2), f"0{nbits}b")
    body = s[1:]
    lead = body[0]
    run = len(body) - len(body.lstrip(lead))
    k = run - 1 if lead == "1" else -run
    rest = body[run + 1:]
    ebits = rest[:es].ljust(es, "0")
    e = int(ebits, 2) if es else 0
    fbits = rest[es:]
    frac = Fraction(int(fbits, 2), 1 << len(fbits)) if fbits else Fraction(0)
    v = Fraction(2) ** (k * (1 << es) + e) * (1 + frac)
    return -v if negative else v


@lru_cache(maxsize=None)
def _value_table(nbits: int, es: int) -> tuple[list[Fraction], list[Fraction]]:
    """Values of positive patterns 1..maxpos and their encoding midpoints."""
    maxpos = (1 << (nbits - 1)) - 1
    vals = [pattern_value(p, nbits, es) for p in range(1, maxpos + 1)]
    mids = [pattern_value(2 * p + 1, nbits + 1, es) for p in range(1, maxpos)]
    return vals, mids


def _floor_pattern(ax: Fraction, nbits: int, es: int) -> int:
    lo, hi = 1, (1 << (nbits - 1)) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if pattern_value(mid, nbits, es) <= ax:
            lo = mid
        else:
            hi = mid - 1
    return lo


def round_exact(x: Fraction, nbits: int = 32, es: int = 2) -> int:
    """Nearest posit to ``x``, ties to the even pattern, saturating."""
    if x == 0:
        return 0
    maxpos = (1 << (nbits - 1)) - 1
    ax = abs(x)
    if nbits <= 16:
        vals, mids = _value_table(nbits, es)
        import bisect

        p = max(bisect.bisect_right(vals, ax), 1)
        if p < maxpos and vals[p - 1] != ax:
            m = mids[p - 1]
            if ax > m or (ax == m and p & 1):
                p += 1
    else:
        if ax >= pattern_value(maxpos, nbits, es):
            p = maxpos
        else:
            p = _floor_pattern(ax, nbits, es)
            if pattern_value(p, nbits, es) != ax:
                m = pattern_value(2 * p + 1, nbits + 1, es)
                if ax > m or (ax == m and p & 1):
                    p += 1
    return p if x > 0 else (-p) & ((1 << nbits) - 1)


def round_sqrt(x: Fraction, nbits: int = 32, es: int = 2) -> int:
    """Posit nearest to sqrt(x) for x > 0, by bisection on squared values."""
    maxpos = (1 << (nbits - 1)) - 1
    lo, hi = 1, maxpos
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if pattern_value(mid, nbits, es) ** 2 <= x:
            lo = mid
        else:
            hi = mid - 1
    p = lo
    if p == maxpos or pattern_value(p, nbits, es) ** 2 == x:
        return p
    m = pattern_value(2 * p + 1, nbits + 1, es)
    if x > m * m or (x == m * m and p & 1):
        p += 1
    return p


def exact_op(op: str, p: int, q: int | None = None, nbits: int = 32,
             es: int = 2) -> int:
    """Correctly rounded result of ``op`` via exact rational arithmetic."""
    nar = 1 << (nbits - 1)
    a = pattern_value(p, nbits, es)
    b = pattern_value(q, nbits, es) if q is not None else Fraction(0)
    if a is None or b is None:
        return nar
    if op == "add":
        return round_exact(a + b, nbits, es)
    if op == "sub":
        return round_exact(a - b, nbits, es)
    if op == "mul":
        return round_exact(a * b, nbits, es)
    if op == "div":
        if b == 0:
            return nar
        return round_exact(a / b, nbits, es)
    if op == "sqrt":
        if a < 0:
            return nar
        if a == 0:
            return 0
        return round_sqrt(a, nbits, es)
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# vectorized Posit(32,2) lattice


def _segments(nbits: int = 32, es: int = 2):
    """Power-of-two posits with the fraction width that follows each.

    Returns arrays (value, pattern, fs, es_used). The patterns between
    consecutive entries are value * (1 + j * 2**-fs).
    """
    width = nbits - 1
    rows = []
    kmax = nbits - 2
    for k in range(-kmax, kmax + 1):
        regime = "1" * (k + 1) + "0" if k >= 0 else "0" * (-k) + "1"
        for e in range(1 << es):
            body = regime + format(e, f"0{es}b") if es else regime
            if len(body) > width:
                if "1" in body[width:]:
                    continue
                body = body[:width]
            es_used = max(0, min(es, width - len(regime)))
            fs = max(0, width - len(regime) - es)
            pat = int("0" + body.ljust(width, "0"), 2)
            rows.append((k * (1 << es) + e, pat, fs, es_used))
    rows.sort(key=lambda r: r[1])
    out = []
    for scale, pat, fs, es_used in rows:
        if out and out[-1][1] == pat:
            continue
        assert pattern_value(pat, nbits, es) == Fraction(2) ** scale
        out.append((scale, pat, fs, es_used))
    scale = np.array([r[0] for r in out], dtype=np.int64)
    return (np.ldexp(1.0, scale), np.array([r[1] for r in out], dtype=np.int64),
            np.array([r[2] for r in out], dtype=np.int64),
            np.array([r[3] for r in out], dtype=np.int64))


class LatticeRounder:
    """Round binary64 magnitudes (plus a residual sign) to Posit(32,2)."""

    nbits = 32
    es = 2

    def __init__(self) -> None:
        self.seg_val, self.seg_pat, self.seg_fs, self.seg_es = _segments(self.nbits, self.es)
        self.seg_len = np.diff(np.append(self.seg_pat, self.seg_pat[-1] + 1))
        self.maxpos = (1 << (self.nbits - 1)) - 1
        self.maxval = float(self.seg_val[-1])
        self.minval = float(self.seg_val[0])

    def floor(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Largest positive pattern with value <= v, and that value (v >= minpos)."""
        i = np.searchsorted(self.seg_val, v, side="right") - 1
        i = np.clip(i, 0, len(self.seg_val) - 1)
        base = self.seg_val[i]
        fs = self.seg_fs[i]
        off = np.floor((v / base - 1.0) * np.ldexp(1.0, fs)).astype(np.int64)
        off = np.clip(off, 0, self.seg_len[i] - 1)
        lower = base * (1.0 + np.ldexp(off.astype(np.float64), -fs))
        return self.seg_pat[i] + off, lower, i, off

    def value(self, pat: np.ndarray) -> np.ndarray:
        """Values of positive patterns in [1, maxpos]."""
        i = np.searchsorted(self.seg_pat, pat, side="right") - 1
        off = pat - self.seg_pat[i]
        return self.seg_val[i] * (1.0 + np.ldexp(off.astype(np.float64), -self.seg_fs[i]))

    def round(self, hi: np.ndarray, direction: np.ndarray) -> np.ndarray:
        """Posit nearest to ``hi + eps * direction`` for an infinitesimal eps.

        ``direction`` is the sign of the exact residual relative to ``hi``
        (same orientation as ``hi`` itself).
        """
        hi = np.asarray(hi, dtype=np.float64)
        direction = np.sign(direction).astype(np.int64)
        neg = hi < 0
        v = np.abs(hi)
        # residual sign measured toward larger magnitude
        up = np.where(neg, -direction, direction)
        out = np.zeros(v.shape, dtype=np.int64)
        nz = v != 0
        sat_hi = v >= self.maxval
        sat_lo = nz & (v <= self.minval)
        body = nz & ~sat_hi & ~sat_lo
        out[sat_hi] = self.maxpos
        out[sat_lo] = 1
        vb = v[body]
        ub = up[body]
        p, lower, i, off = self.floor(vb)
        upper = self.value(np.minimum(p + 1, self.maxpos))
        es_used = self.seg_es[i]
        mid = np.where(es_used == self.es, 0.5 * (lower + upper),
                       np.where(es_used == 1, lower * 2.0, lower * 4.0))
        on_grid = vb == lower
        go_up = (vb > mid) | ((vb == mid) & ((ub > 0) | ((ub == 0) & (p & 1 == 1))))
        res = np.where(on_grid, p, np.where(go_up, p + 1, p))
        out[body] = res
        out = np.where(neg, (-out) & 0xFFFFFFFF, out)
        return out.astype(np.uint32)

    def from_f64(self, x: np.ndarray) -> np.ndarray:
        return self.round(x, np.zeros(np.shape(x)))

    def to_f64(self, bits: np.ndarray) -> np.ndarray:
        b = np.asarray(bits, dtype=np.int64) & 0xFFFFFFFF
        neg = b >= 0x80000000
        mag = np.where(neg, (-b) & 0xFFFFFFFF, b)
        out = np.zeros(b.shape, dtype=np.float64)
        nz = (mag != 0) & (b != 0x80000000)
        out[nz] = self.value(mag[nz])
        out[b == 0x80000000] = np.nan
        return np.where(neg, -out, out)


_SPLIT = 134217729.0  # 2**27 + 1


def _split(a):
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def eft_op(rounder: LatticeRounder, op: str, p: np.ndarray,
           q: np.ndarray | None = None) -> np.ndarray:
    """Correctly rounded Posit(32,2) results via error-free transformations.

    Operands must be real (no NaR); division by zero and square roots of
    negative operands are excluded by the caller.
    """
    a = rounder.to_f64(p)
    if op == "sqrt":
        s = np.sqrt(a)
        pp, e = two_prod(s, s)
        r = (a - pp) - e
        return rounder.round(s, np.sign(r))
    b = rounder.to_f64(q)
    if op == "add":
        s, e = two_sum(a, b)
        return rounder.round(s, np.sign(e))
    if op == "mul":
        pp, e = two_prod(a, b)
        return rounder.round(pp, np.sign(e))
    if op == "div":
        quo = a / b
        pp, e = two_prod(quo, b)
        r = (a - pp) - e
        return rounder.round(quo, np.sign(r) * np.sign(b))
    raise ValueError(f"unknown op {op!r}")


def log_uniform(rng: np.random.Generator, a: float, b: float, size: int) -> np.ndarray:
    return np.exp(rng.uniform(math.log(a), math.log(b), size))
