from .matrix import load_matrix, posit_to_f64, save_matrix, to_binary32, to_posit
from .routines import (
    DEFAULT_BLOCK,
    DimensionError,
    LinalgError,
    SingularMatrixError,
    binary32_routines,
    posit_routines,
    rgemm,
    rgetrf,
    rgetrs,
    rpotrf,
    rpotrs,
    rtrsm,
    sgemm,
    sgetrf,
    sgetrs,
    spotrf,
    spotrs,
    strsm,
)
