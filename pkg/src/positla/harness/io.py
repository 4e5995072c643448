"""CSV and JSON sidecar writers.

Floats are written with ``repr`` so a rerun with the same config gives the
same bytes. Timing columns are the only nondeterministic fields; readers
comparing runs should drop them (see ``TIMING_COLUMNS``).
"""
from __future__ import annotations

import csv
import dataclasses
import json
import os
from pathlib import Path
from typing import Iterable

from .. import __version__
from .rng import RNG_NAME

ERRORS_COLUMNS = ("algo", "N", "sigma", "seed", "e_posit", "e_binary32", "digits",
                  "info_posit", "info_binary32")
MICROBENCH_COLUMNS = ("op", "range", "samples", "mean_regime_iters", "mean_norm_shifts",
                      "mean_total_steps", "wall_ns_per_op")
BENCH_COLUMNS = ("kernel", "N", "K", "sigma", "ops", "seconds", "gflops")
TIMING_COLUMNS = frozenset({"wall_ns_per_op", "seconds", "gflops"})
NORM_NAME = "2-norm"


def _cell(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def write_csv(path: str | os.PathLike, columns: Iterable[str], records) -> Path:
    path = Path(path)
    columns = tuple(columns)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in records:
            row = dataclasses.asdict(r) if dataclasses.is_dataclass(r) else dict(r)
            w.writerow([_cell(row[c]) for c in columns])
    return path


def read_csv(path: str | os.PathLike, drop_timing: bool = False) -> list[dict[str, str]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if drop_timing:
        rows = [{k: v for k, v in r.items() if k not in TIMING_COLUMNS} for r in rows]
    return rows


def write_metadata(path: str | os.PathLike, *, seeds, block: int | None, **extra) -> Path:
    meta = {
        "seeds": [int(s) for s in seeds],
        "rng": RNG_NAME,
        "norm": NORM_NAME,
        "block": block,
        "version": __version__,
    }
    meta.update(extra)
    path = Path(path)
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def check_output_dir(path: str | os.PathLike) -> Path:
    """Create ``path`` if needed and confirm it is writable."""
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {path}: {exc}") from exc
    if not path.is_dir() or not os.access(path, os.W_OK | os.X_OK):
        raise OSError(f"output directory {path} is not writable")
    return path
