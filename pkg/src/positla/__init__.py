"""Posit(32,2) arithmetic, a posit BLAS/LAPACK subset, and an accuracy harness."""
__version__ = "0.1.0"
