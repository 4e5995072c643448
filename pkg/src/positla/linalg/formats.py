"""Scalar operation tables handed to the kernel builder."""
from __future__ import annotations

import math
from types import SimpleNamespace

import numba as nb
import numpy as np

from ..posit import kernels as pk

_jit = nb.njit(cache=True, nogil=True)


@_jit
def _posit_positive(x):
    return pk.signed(x) > 0


@_jit
def _posit_is_zero(x):
    return x == 0


POSIT = SimpleNamespace(
    name="posit32", dtype=np.uint32, zero=np.uint32(0),
    one=np.uint32(pk.ONE), neg_one=np.uint32(pk.NEG_ONE),
    add=pk.add, sub=pk.sub, mul=pk.mul, div=pk.div, sqrt=pk.sqrt,
    key=pk.abs_key, positive=_posit_positive, is_zero=_posit_is_zero,
)


@_jit
def _f32_add(a, b):
    return np.float32(np.float32(a) + np.float32(b))


@_jit
def _f32_sub(a, b):
    return np.float32(np.float32(a) - np.float32(b))


@_jit
def _f32_mul(a, b):
    return np.float32(np.float32(a) * np.float32(b))


@_jit
def _f32_div(a, b):
    return np.float32(np.float32(a) / np.float32(b))


@_jit
def _f32_sqrt(a):
    # binary64 sqrt of a binary32 operand rounds correctly to binary32
    return np.float32(math.sqrt(np.float64(a)))


@_jit
def _f32_key(a):
    return abs(np.float32(a))


@_jit
def _f32_positive(a):
    return a > 0


@_jit
def _f32_is_zero(a):
    return a == 0


BINARY32 = SimpleNamespace(
    name="f32", dtype=np.float32, zero=np.float32(0.0),
    one=np.float32(1.0), neg_one=np.float32(-1.0),
    add=_f32_add, sub=_f32_sub, mul=_f32_mul, div=_f32_div, sqrt=_f32_sqrt,
    key=_f32_key, positive=_f32_positive, is_zero=_f32_is_zero,
)
