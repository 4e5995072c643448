"""Seeded random streams for the experiments.

Raw 64-bit words come from numpy's Philox-4x64 counter-based generator
keyed by the seed; that bit stream is fixed by the algorithm. Uniforms and
normals are derived here rather than through ``numpy.random.Generator`` so
the transform is pinned too:

* uniform: ``((w >> 11) + 0.5) * 2**-53``, in the open interval (0, 1)
* normal: Box-Muller on consecutive uniform pairs ``(u1, u2)``, giving
  ``sqrt(-2 ln u1) * cos(2 pi u2)`` then ``sqrt(-2 ln u1) * sin(2 pi u2)``
"""
from __future__ import annotations

import math

import numpy as np

RNG_NAME = "philox4x64+box-muller"


class Rng:
    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._bits = np.random.Philox(key=self.seed)

    def raw(self, n: int) -> np.ndarray:
        return self._bits.random_raw(n)

    def uniform(self, n: int) -> np.ndarray:
        w = self.raw(n)
        return ((w >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53

    def normal(self, n: int) -> np.ndarray:
        m = (n + 1) // 2
        u = self.uniform(2 * m)
        u1, u2 = u[0::2], u[1::2]
        r = np.sqrt(-2.0 * np.log(u1))
        out = np.empty(2 * m)
        out[0::2] = r * np.cos(2.0 * math.pi * u2)
        out[1::2] = r * np.sin(2.0 * math.pi * u2)
        return out[:n]

    def log_uniform(self, a: float, b: float, n: int) -> np.ndarray:
        """Values with log uniformly distributed on [log a, log b)."""
        la, lb = math.log(a), math.log(b)
        v = np.exp(la + (lb - la) * self.uniform(n))
        # exp may round up onto the excluded endpoint
        return np.minimum(v, np.nextafter(b, 0.0))
