from .config import POSIT32, PositConfig
from .core import (
    DecodedPosit,
    OpCounters,
    Posit32,
    RealClass,
    Special,
    UnpackedReal,
    abs_,
    add,
    cmp,
    decode,
    div,
    encode_round,
    eps_at,
    from_f32,
    from_f64,
    mul,
    neg,
    sqrt,
    sub,
    to_f32,
    to_f64,
    to_unpacked,
    unpack,
)

NAR = POSIT32.nar
