"""Compiled Posit(32,2) scalar kernels.

Same decode / exact compute / round-once pipeline as
:mod:`positla.posit.core`, specialized to 32 bits with int64 significands
so it can run inside numba loops. Patterns travel as int64 in
``[0, 2**32)``. No counters are kept here; the reference module is the
instrumented path.
"""
from __future__ import annotations

import math

import numba as nb
import numpy as np
from numba.cpython.unsafe.numbers import leading_zeros

MASK = 0xFFFFFFFF
NAR = 0x80000000
MAXPOS = 0x7FFFFFFF
MAX_SCALE = 120
ONE = 0x40000000
NEG_ONE = 0xC0000000

# significand of a decoded operand: leading one at bit 27
_DEC_TOP = 27
# significand handed to the encoder: leading one at bit 62
_ENC_TOP = 62
_FRAC62 = (1 << 62) - 1

_jit = nb.njit(cache=True, nogil=True)


@_jit
def bit_length(x):
    return 64 - leading_zeros(np.int64(x))


@_jit
def decode(p):
    """Return (negative, scale, sig) for a finite nonzero pattern."""
    p = np.int64(p)
    neg = (p >> 31) & 1
    if neg:
        p = (-p) & MASK
    body = p & 0x7FFFFFFF
    if body >> 30:
        inv = (~body) & 0x7FFFFFFF
        run = 31 - bit_length(inv)
        k = run - 1
    else:
        run = 31 - bit_length(body)
        k = -run
    rest_w = 30 - run
    if rest_w < 0:
        rest_w = 0
    es_used = 2 if rest_w >= 2 else rest_w
    fs = rest_w - es_used
    rest = body & ((np.int64(1) << rest_w) - 1)
    e = (rest >> fs) << (2 - es_used)
    frac = rest & ((np.int64(1) << fs) - 1)
    sig = ((np.int64(1) << fs) | frac) << (_DEC_TOP - fs)
    return neg, 4 * k + e, sig


@_jit
def encode(neg, scale, sig, sticky):
    """Round sign * sig * 2**(scale - 62) to a pattern; sig has bit 62 set."""
    if scale >= MAX_SCALE:
        mag = np.int64(MAXPOS)
    elif scale < -MAX_SCALE:
        mag = np.int64(1)
    else:
        k = scale >> 2
        e = scale & 3
        if k >= 0:
            run = k + 1
            regime = ((np.int64(1) << run) - 1) << 1
        else:
            run = -k
            regime = np.int64(1)
        head = (regime << 2) | e
        hl = run + 3
        frac = sig & _FRAC62
        if hl <= 31:
            fs = 31 - hl
            mag = (head << fs) | (frac >> (62 - fs))
            rnd = (frac >> (61 - fs)) & 1
            st = sticky or (frac & ((np.int64(1) << (61 - fs)) - 1)) != 0
        else:
            d = hl - 31
            mag = head >> d
            rnd = (head >> (d - 1)) & 1
            st = sticky or frac != 0 or (head & ((np.int64(1) << (d - 1)) - 1)) != 0
        if rnd and (st or (mag & 1)):
            mag += 1
    if neg:
        return (-mag) & MASK
    return mag


@_jit
def add(p, q):
    p = np.int64(p)
    q = np.int64(q)
    if p == NAR or q == NAR:
        return np.int64(NAR)
    if p == 0:
        return q
    if q == 0:
        return p
    na, sa, ma = decode(p)
    nb_, sb, mb = decode(q)
    if sa < sb or (sa == sb and ma < mb):
        na, sa, ma, nb_, sb, mb = nb_, sb, mb, na, sa, ma
    big = ma << 32
    small = mb << 32
    d = sa - sb
    if d >= 60:
        small = np.int64(1)
    elif d > 0:
        lost = small & ((np.int64(1) << d) - 1)
        small = small >> d
        if lost != 0:
            small |= 1
    if na == nb_:
        r = big + small
    else:
        r = big - small
    if r == 0:
        return np.int64(0)
    lead = bit_length(r) - 1
    return encode(na, sa + lead - 59, r << (_ENC_TOP - lead), False)


@_jit
def neg(p):
    return (-np.int64(p)) & MASK


@_jit
def sub(p, q):
    return add(p, neg(q))


@_jit
def mul(p, q):
    p = np.int64(p)
    q = np.int64(q)
    if p == NAR or q == NAR:
        return np.int64(NAR)
    if p == 0 or q == 0:
        return np.int64(0)
    na, sa, ma = decode(p)
    nb_, sb, mb = decode(q)
    r = ma * mb
    lead = bit_length(r) - 1
    return encode(na ^ nb_, sa + sb + lead - 54, r << (_ENC_TOP - lead), False)


@_jit
def div(p, q):
    p = np.int64(p)
    q = np.int64(q)
    if p == NAR or q == NAR or q == 0:
        return np.int64(NAR)
    if p == 0:
        return np.int64(0)
    na, sa, ma = decode(p)
    nb_, sb, mb = decode(q)
    num = ma << 35
    r = num // mb
    rem = num - r * mb
    lead = bit_length(r) - 1
    return encode(na ^ nb_, sa - sb + lead - 35, r << (_ENC_TOP - lead), rem != 0)


@_jit
def isqrt(x):
    r = np.int64(math.sqrt(np.float64(x)))
    while r * r > x:
        r -= 1
    while (r + 1) * (r + 1) <= x:
        r += 1
    return r


@_jit
def sqrt(p):
    p = np.int64(p)
    if p == 0:
        return np.int64(0)
    if p & NAR:
        return np.int64(NAR)
    _, sa, ma = decode(p)
    s = 34 if sa & 1 else 35
    x = ma << s
    r = isqrt(x)
    lead = bit_length(r) - 1
    scale = ((sa - _DEC_TOP - s) >> 1) + lead
    return encode(0, scale, r << (_ENC_TOP - lead), r * r != x)


@_jit
def abs_key(p):
    """Signed pattern of |p|; orders magnitudes, NaR lowest."""
    s = np.int64(p) & MASK
    if s & NAR:
        s = (-s) & MASK
    if s & NAR:
        return s - (np.int64(1) << 32)
    return s


@_jit
def signed(p):
    s = np.int64(p) & MASK
    if s & NAR:
        return s - (np.int64(1) << 32)
    return s


@_jit
def from_f64(x):
    if math.isnan(x) or math.isinf(x):
        return np.int64(NAR)
    if x == 0.0:
        return np.int64(0)
    m, ex = math.frexp(abs(x))
    mag = np.int64(m * 9007199254740992.0)
    return encode(1 if x < 0 else 0, ex - 1, mag << 10, False)


@_jit
def to_f64(p):
    p = np.int64(p)
    if p == 0:
        return 0.0
    if p == NAR:
        return np.nan
    n, scale, sig = decode(p)
    v = math.ldexp(np.float64(sig), scale - _DEC_TOP)
    return -v if n else v


@_jit
def roundtrip(p):
    """decode then encode; identity for every pattern."""
    p = np.int64(p)
    if p == 0 or p == NAR:
        return p
    n, scale, sig = decode(p)
    return encode(n, scale, sig << (_ENC_TOP - _DEC_TOP), False)


_u32 = ["uint32(uint32, uint32)"]

add_u = nb.vectorize(_u32, cache=True)(add.py_func)
sub_u = nb.vectorize(_u32, cache=True)(sub.py_func)
mul_u = nb.vectorize(_u32, cache=True)(mul.py_func)
div_u = nb.vectorize(_u32, cache=True)(div.py_func)
sqrt_u = nb.vectorize(["uint32(uint32)"], cache=True)(sqrt.py_func)
neg_u = nb.vectorize(["uint32(uint32)"], cache=True)(neg.py_func)
from_f64_u = nb.vectorize(["uint32(float64)"], cache=True)(from_f64.py_func)
to_f64_u = nb.vectorize(["float64(uint32)"], cache=True)(to_f64.py_func)


@nb.njit(cache=True)
def count_roundtrip_failures(start, stop):
    """Number of patterns in [start, stop) that do not survive decode/encode."""
    bad = 0
    for p in range(start, stop):
        if roundtrip(p) != p:
            bad += 1
    return bad
