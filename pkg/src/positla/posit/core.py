"""Reference posit arithmetic on Python integers.

Every operation follows the same three stages: decode the operand patterns
into sign/scale/significand, compute on an unpacked real with a 64-bit
significand and a sticky bit, then encode with a single round-to-nearest,
ties-to-even step on the destination encoding.

The routines take a :class:`PositConfig` so the identical code can be run
exhaustively at 8 and 16 bits; the defaults are Posit(32,2). Patterns are
plain ``int`` values in ``[0, 2**nbits)``.

This module is the instrumented, readable implementation. The numba
kernels in :mod:`positla.posit.kernels` are bit-compatible and are what the
linear algebra routines call.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .config import POSIT32, PositConfig

SIG_BITS = 64
TOP = SIG_BITS - 1


class Special(enum.Enum):
    ZERO = "zero"
    NAR = "nar"


class RealClass(enum.Enum):
    ZERO = "zero"
    NAR = "nar"
    FINITE = "finite"


@dataclass
class OpCounters:
    """Instruction-proxy counters for a software posit pipeline.

    ``regime_iters`` counts the bits a sequential regime scan visits while
    decoding; ``norm_shifts`` counts single-bit normalization steps plus the
    regime bits emitted while encoding.
    """

    regime_iters: int = 0
    norm_shifts: int = 0

    @property
    def total_steps(self) -> int:
        return self.regime_iters + self.norm_shifts

    def __iadd__(self, other: OpCounters) -> OpCounters:
        self.regime_iters += other.regime_iters
        self.norm_shifts += other.norm_shifts
        return self

    def __add__(self, other: OpCounters) -> OpCounters:
        return OpCounters(self.regime_iters + other.regime_iters,
                          self.norm_shifts + other.norm_shifts)


@dataclass(frozen=True)
class DecodedPosit:
    """Fields of a finite nonzero posit.

    ``frac`` holds the ``fs`` fraction bits as an integer, so the value is
    ``sign * u**k * 2**e * (1 + frac / 2**fs)``.
    """

    sign: int
    k: int
    e: int
    frac: int
    fs: int
    run: int
    es: int = 2

    @property
    def scale(self) -> int:
        return (self.k << self.es) + self.e


@dataclass(frozen=True)
class UnpackedReal:
    """Sign/scale/significand form shared by all arithmetic.

    For finite values ``sig`` has its leading one at bit 63 and the value
    is ``sign * 2**scale * sig / 2**63``; ``sticky`` records that nonzero
    bits were discarded below bit 0.
    """

    cls: RealClass
    sign: int = 1
    scale: int = 0
    sig: int = 0
    sticky: bool = False

    def __post_init__(self) -> None:
        if self.cls is RealClass.FINITE and self.sig >> TOP != 1:
            raise ValueError("finite UnpackedReal must be normalized")

    @classmethod
    def zero(cls) -> UnpackedReal:
        return cls(RealClass.ZERO)

    @classmethod
    def nar(cls) -> UnpackedReal:
        return cls(RealClass.NAR)


_ZERO = UnpackedReal.zero()
_NAR = UnpackedReal.nar()


def _normalize(sign: int, scale: int, mag: int, sticky: bool, top: int,
               counters: OpCounters | None) -> UnpackedReal:
    """Build a normalized real from ``sign * mag * 2**(scale - top)``."""
    if mag == 0:
        # only reachable through exact cancellation
        return _ZERO
    lead = mag.bit_length() - 1
    if counters is not None:
        counters.norm_shifts += abs(lead - top)
    shift = lead - TOP
    if shift > 0:
        sticky = sticky or (mag & ((1 << shift) - 1)) != 0
        mag >>= shift
    else:
        mag <<= -shift
    return UnpackedReal(RealClass.FINITE, sign, scale + lead - top, mag, sticky)


def decode(bits: int, cfg: PositConfig = POSIT32,
           counters: OpCounters | None = None) -> DecodedPosit | Special:
    bits &= cfg.mask
    if bits == 0:
        return Special.ZERO
    if bits == cfg.nar:
        return Special.NAR
    sign = 1
    if bits & cfg.nar:
        sign = -1
        bits = (-bits) & cfg.mask
    width = cfg.nbits - 1
    body = bits & ((1 << width) - 1)
    first = body >> (width - 1)
    run = 0
    pos = width - 1
    while pos >= 0 and (body >> pos) & 1 == first:
        run += 1
        pos -= 1
    if counters is not None:
        counters.regime_iters += run
    k = run - 1 if first else -run
    rest_width = max(width - run - 1, 0)
    rest = body & ((1 << rest_width) - 1)
    es_used = min(cfg.es, rest_width)
    fs = rest_width - es_used
    e = (rest >> fs) << (cfg.es - es_used)
    frac = rest & ((1 << fs) - 1)
    return DecodedPosit(sign, k, e, frac, fs, run, cfg.es)


def unpack(d: DecodedPosit | Special) -> UnpackedReal:
    if d is Special.ZERO:
        return _ZERO
    if d is Special.NAR:
        return _NAR
    sig = ((1 << d.fs) | d.frac) << (TOP - d.fs)
    return UnpackedReal(RealClass.FINITE, d.sign, d.scale, sig, False)


def to_unpacked(bits: int, cfg: PositConfig = POSIT32,
                counters: OpCounters | None = None) -> UnpackedReal:
    return unpack(decode(bits, cfg, counters))


def encode_round(x: UnpackedReal, cfg: PositConfig = POSIT32,
                 counters: OpCounters | None = None) -> int:
    """Round ``x`` to the nearest posit, ties to even on the encoding.

    Magnitudes beyond maxpos or below minpos saturate; a finite nonzero
    input never becomes zero or NaR.
    """
    if x.cls is RealClass.ZERO:
        return 0
    if x.cls is RealClass.NAR:
        return cfg.nar
    es = cfg.es
    if x.scale >= cfg.max_scale:
        mag, run = cfg.maxpos, cfg.nbits - 1
    elif x.scale < -cfg.max_scale:
        mag, run = cfg.minpos, cfg.nbits - 1
    else:
        k = x.scale >> es
        e = x.scale & ((1 << es) - 1)
        if k >= 0:
            run = k + 1
            regime = ((1 << run) - 1) << 1
        else:
            run = -k
            regime = 1
        body = (((regime << es) | e) << TOP) | (x.sig - (1 << TOP))
        shift = (run + 1 + es + TOP) - (cfg.nbits - 1)
        mag = body >> shift
        rnd = (body >> (shift - 1)) & 1
        sticky = x.sticky or (body & ((1 << (shift - 1)) - 1)) != 0
        if rnd and (sticky or mag & 1):
            mag += 1
    if counters is not None:
        counters.norm_shifts += run
    return mag if x.sign > 0 else (-mag) & cfg.mask


def neg(p: int, cfg: PositConfig = POSIT32) -> int:
    return (-p) & cfg.mask


def abs_(p: int, cfg: PositConfig = POSIT32) -> int:
    p &= cfg.mask
    return neg(p, cfg) if p & cfg.nar else p


def cmp(p: int, q: int, cfg: PositConfig = POSIT32) -> int:
    """Three-way compare: -1, 0 or 1. NaR sorts below every real."""
    a, b = cfg.to_signed(p), cfg.to_signed(q)
    return (a > b) - (a < b)


def add(p: int, q: int, cfg: PositConfig = POSIT32,
        counters: OpCounters | None = None) -> int:
    a = to_unpacked(p, cfg, counters)
    b = to_unpacked(q, cfg, counters)
    if a.cls is RealClass.NAR or b.cls is RealClass.NAR:
        return cfg.nar
    if a.cls is RealClass.ZERO:
        return q & cfg.mask
    if b.cls is RealClass.ZERO:
        return p & cfg.mask
    if (a.scale, a.sig) < (b.scale, b.sig):
        a, b = b, a
    diff = a.scale - b.scale
    # three spare low bits so a jammed sticky never reaches the rounding point
    big = a.sig << 3
    small = b.sig << 3
    sticky = False
    if diff:
        if diff >= SIG_BITS + 3:
            small, sticky = 0, True
        else:
            sticky = (small & ((1 << diff) - 1)) != 0
            small >>= diff
        small |= int(sticky)
    mag = big + small if a.sign == b.sign else big - small
    r = _normalize(a.sign, a.scale, mag, False, TOP + 3, counters)
    return encode_round(r, cfg, counters)


def sub(p: int, q: int, cfg: PositConfig = POSIT32,
        counters: OpCounters | None = None) -> int:
    return add(p, neg(q, cfg), cfg, counters)


def mul(p: int, q: int, cfg: PositConfig = POSIT32,
        counters: OpCounters | None = None) -> int:
    a = to_unpacked(p, cfg, counters)
    b = to_unpacked(q, cfg, counters)
    if a.cls is RealClass.NAR or b.cls is RealClass.NAR:
        return cfg.nar
    if a.cls is RealClass.ZERO or b.cls is RealClass.ZERO:
        return 0
    r = _normalize(a.sign * b.sign, a.scale + b.scale, a.sig * b.sig, False,
                   2 * TOP, counters)
    return encode_round(r, cfg, counters)


def div(p: int, q: int, cfg: PositConfig = POSIT32,
        counters: OpCounters | None = None) -> int:
    a = to_unpacked(p, cfg, counters)
    b = to_unpacked(q, cfg, counters)
    if a.cls is RealClass.NAR or b.cls is not RealClass.FINITE:
        return cfg.nar
    if a.cls is RealClass.ZERO:
        return 0
    quo, rem = divmod(a.sig << SIG_BITS, b.sig)
    r = _normalize(a.sign * b.sign, a.scale - b.scale, quo, rem != 0,
                   SIG_BITS, counters)
    return encode_round(r, cfg, counters)


def sqrt(p: int, cfg: PositConfig = POSIT32,
         counters: OpCounters | None = None) -> int:
    a = to_unpacked(p, cfg, counters)
    if a.cls is RealClass.ZERO:
        return 0
    if a.cls is RealClass.NAR or a.sign < 0:
        return cfg.nar
    sig, scale = a.sig, a.scale
    if scale & 1:
        sig <<= 1
        scale -= 1
    radicand = sig << TOP
    root = math.isqrt(radicand)
    r = _normalize(1, scale // 2, root, root * root != radicand, TOP, counters)
    return encode_round(r, cfg, counters)


def from_f64(x: float, cfg: PositConfig = POSIT32) -> int:
    if math.isnan(x) or math.isinf(x):
        return cfg.nar
    if x == 0.0:
        return 0
    m, ex = math.frexp(abs(x))
    mag = int(m * (1 << 53))
    r = _normalize(1 if x > 0 else -1, ex - 1, mag, False, 52, None)
    return encode_round(r, cfg)


def to_f64(p: int, cfg: PositConfig = POSIT32) -> float:
    d = decode(p, cfg)
    if d is Special.ZERO:
        return 0.0
    if d is Special.NAR:
        return math.nan
    return d.sign * math.ldexp((1 << d.fs) | d.frac, d.scale - d.fs)


def from_f32(x, cfg: PositConfig = POSIT32) -> int:
    # binary32 -> binary64 widening is exact
    return from_f64(float(x), cfg)


def to_f32(p: int, cfg: PositConfig = POSIT32):
    import numpy as np

    return np.float32(to_f64(p, cfg))


def eps_at(p: int, cfg: PositConfig = POSIT32) -> float:
    """Gap from ``|p|`` to the next posit away from zero.

    Where every exponent bit is present this is ``2**(scale - fs)``.
    maxpos has no successor and reports the gap to its predecessor.
    """
    p &= cfg.mask
    if p == 0 or p == cfg.nar:
        return math.nan
    a = abs_(p, cfg)
    if a == cfg.maxpos:
        return to_f64(a, cfg) - to_f64(a - 1, cfg)
    return to_f64(a + 1, cfg) - to_f64(a, cfg)


@dataclass(frozen=True, order=False)
class Posit32:
    """A Posit(32,2) value carried as its 32-bit pattern."""

    bits: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "bits", self.bits & 0xFFFFFFFF)

    @classmethod
    def from_float(cls, x: float) -> Posit32:
        return cls(from_f64(x))

    @property
    def is_nar(self) -> bool:
        return self.bits == POSIT32.nar

    @property
    def is_zero(self) -> bool:
        return self.bits == 0

    def __float__(self) -> float:
        return to_f64(self.bits)

    def __repr__(self) -> str:
        return f"Posit32(0x{self.bits:08X})"

    def __add__(self, other: Posit32) -> Posit32:
        return Posit32(add(self.bits, other.bits))

    def __sub__(self, other: Posit32) -> Posit32:
        return Posit32(sub(self.bits, other.bits))

    def __mul__(self, other: Posit32) -> Posit32:
        return Posit32(mul(self.bits, other.bits))

    def __truediv__(self, other: Posit32) -> Posit32:
        return Posit32(div(self.bits, other.bits))

    def __neg__(self) -> Posit32:
        return Posit32(neg(self.bits))

    def __abs__(self) -> Posit32:
        return Posit32(abs_(self.bits))

    def sqrt(self) -> Posit32:
        return Posit32(sqrt(self.bits))

    def __lt__(self, other: Posit32) -> bool:
        return cmp(self.bits, other.bits) < 0

    def __le__(self, other: Posit32) -> bool:
        return cmp(self.bits, other.bits) <= 0

    def __gt__(self, other: Posit32) -> bool:
        return cmp(self.bits, other.bits) > 0

    def __ge__(self, other: Posit32) -> bool:
        return cmp(self.bits, other.bits) >= 0
