"""Backward-error comparison of Posit(32,2) and binary32 linear solves."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..linalg import matrix as mx
from ..linalg import routines as rt
from .rng import Rng

ALGOS = ("cholesky", "lu")
SWEEP_SIGMAS = (1e-2, 1e0, 1e2, 1e4, 1e6)


@dataclass(frozen=True)
class ExperimentConfig:
    algo: str
    N: int
    sigma: float
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5)
    block: int = rt.DEFAULT_BLOCK

    def __post_init__(self) -> None:
        if self.algo not in ALGOS:
            raise ValueError(f"algo must be one of {ALGOS}")
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")
        if self.block < 1:
            raise ValueError("block must be >= 1")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))


@dataclass(frozen=True)
class ErrorRecord:
    algo: str
    N: int
    sigma: float
    seed: int
    e_posit: float
    e_binary32: float
    digits: float
    info_posit: int = 0
    info_binary32: int = 0


def gen_normal(rng: Rng, rows: int, cols: int, sigma: float) -> np.ndarray:
    """i.i.d. N(0, sigma**2) binary64 matrix, filled column by column."""
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    z = rng.normal(rows * cols)
    return np.asfortranarray((sigma * z).reshape((rows, cols), order="F"))


def make_spd(X: np.ndarray) -> np.ndarray:
    """X^T X in binary64 with the upper triangle mirrored from the lower."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError("make_spd needs a square matrix")
    A = X.T @ X
    lower = np.tril(A)
    return np.asfortranarray(lower + np.tril(A, -1).T)


def backward_error(A: np.ndarray, x: np.ndarray, b: np.ndarray) -> float:
    """||b - A x||_2 / ||b||_2, all in binary64."""
    A = np.asarray(A, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    nb = np.linalg.norm(b)
    if nb == 0.0:
        raise ValueError("right-hand side has zero norm")
    return float(np.linalg.norm(b - A @ x) / nb)


def digits_advantage(e_posit: float, e_binary32: float) -> float:
    """log10(e_binary32 / e_posit); positive when posit is more accurate."""
    if math.isnan(e_posit) or math.isnan(e_binary32):
        return math.nan
    if e_posit == 0.0 and e_binary32 == 0.0:
        return 0.0
    if e_posit == 0.0:
        return math.inf
    if e_binary32 == 0.0:
        return -math.inf
    return math.log10(e_binary32 / e_posit)


def build_system(algo: str, N: int, sigma: float, seed: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Input matrix, true solution (all 1/sqrt(N)) and right-hand side."""
    X = gen_normal(Rng(seed), N, N, sigma)
    A = make_spd(X) if algo == "cholesky" else X
    x_sol = np.full((N, 1), 1.0 / math.sqrt(N))
    b = A @ x_sol
    return A, x_sol, b


def solve_posit(algo: str, A: np.ndarray, b: np.ndarray, block: int):
    P = mx.to_posit(A)
    pb = mx.to_posit(b)
    if algo == "cholesky":
        info = rt.rpotrf(P, block)
        if info:
            return None, info
        x = rt.rpotrs(P, pb)
    else:
        ipiv, info = rt.rgetrf(P, block)
        if info:
            return None, info
        x = rt.rgetrs(P, ipiv, pb)
    return mx.posit_to_f64(x), 0


def solve_binary32(algo: str, A: np.ndarray, b: np.ndarray, block: int):
    S = mx.to_binary32(A)
    sb = mx.to_binary32(b)
    if algo == "cholesky":
        info = rt.spotrf(S, block)
        if info:
            return None, info
        x = rt.spotrs(S, sb)
    else:
        ipiv, info = rt.sgetrf(S, block)
        if info:
            return None, info
        x = rt.sgetrs(S, ipiv, sb)
    return x.astype(np.float64), 0


def solve_pair(algo: str, A: np.ndarray, b: np.ndarray, block: int = rt.DEFAULT_BLOCK,
               *, N: int | None = None, sigma: float = math.nan, seed: int = -1) -> ErrorRecord:
    xp, info_p = solve_posit(algo, A, b, block)
    xs, info_s = solve_binary32(algo, A, b, block)
    ep = backward_error(A, xp, b) if xp is not None else math.nan
    es = backward_error(A, xs, b) if xs is not None else math.nan
    return ErrorRecord(algo, N if N is not None else A.shape[0], sigma, seed, ep, es,
                       digits_advantage(ep, es), info_p, info_s)


def run_cell(algo: str, N: int, sigma: float, seed: int, block: int) -> ErrorRecord:
    A, _, b = build_system(algo, N, sigma, seed)
    return solve_pair(algo, A, b, block, N=N, sigma=sigma, seed=seed)


def run_error_experiment(cfg: ExperimentConfig, threads: int = 1) -> list[ErrorRecord]:
    cells = [(cfg.algo, cfg.N, cfg.sigma, s, cfg.block) for s in cfg.seeds]
    return run_cells(cells, threads)


def run_cells(cells: list[tuple], threads: int = 1) -> list[ErrorRecord]:
    """Evaluate (algo, N, sigma, seed, block) cells; output keeps input order."""
    if threads <= 1:
        return [run_cell(*c) for c in cells]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda c: run_cell(*c), cells))


def median_digits(records: list[ErrorRecord]) -> float:
    """Median digits over records where both factorizations succeeded."""
    d = [r.digits for r in records if not math.isnan(r.digits)]
    return float(np.median(d)) if d else math.nan
