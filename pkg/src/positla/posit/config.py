from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PositConfig:
    """Width parameters of a posit format.

    Only ``POSIT32`` (nbits=32, es=2) is part of the public surface. The
    narrower configurations exist so the reference code paths can be
    checked exhaustively in tests.
    """

    nbits: int = 32
    es: int = 2

    def __post_init__(self) -> None:
        if self.nbits < 3 or self.nbits > 64:
            raise ValueError(f"unsupported posit width {self.nbits}")
        if self.es < 0 or self.es > 4:
            raise ValueError(f"unsupported exponent width {self.es}")

    @property
    def u(self) -> int:
        """Regime base 2**(2**es)."""
        return 1 << (1 << self.es)

    @property
    def mask(self) -> int:
        return (1 << self.nbits) - 1

    @property
    def nar(self) -> int:
        return 1 << (self.nbits - 1)

    @property
    def maxpos(self) -> int:
        return (1 << (self.nbits - 1)) - 1

    @property
    def minpos(self) -> int:
        return 1

    @property
    def max_scale(self) -> int:
        """Binary exponent of maxpos; minpos is 2**-max_scale."""
        return (self.nbits - 2) << self.es

    def to_signed(self, bits: int) -> int:
        bits &= self.mask
        return bits - (1 << self.nbits) if bits & self.nar else bits


POSIT32 = PositConfig(32, 2)
