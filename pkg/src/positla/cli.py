"""Command-line front end: ``positla <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .harness import bench as hb
from .harness import io as hio
from .harness.experiments import ALGOS, SWEEP_SIGMAS, ExperimentConfig, median_digits, run_cells
from .harness.microbench import MIN_SAMPLES, OPS, RANGES, range_microbench
from .harness.rng import Rng
from .harness.systolic import systolic_model

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ENV_OUT = "POSITLA_OUT"
ENV_THREADS = "POSITLA_THREADS"

EPILOG = f"""\
environment:
  {ENV_OUT}      default output directory (otherwise ./results)
  {ENV_THREADS}  default worker thread count (otherwise the CPU count)

lists accept commas and inclusive integer ranges, e.g. --seeds 1..5 or
--sigma 1e-2,1,1e2.
exit codes: 0 success, 1 check failure, 2 usage error."""


class UsageError(Exception):
    pass


def parse_list(text: str, conv=float) -> list:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise UsageError(f"empty item in list {text!r}")
        try:
            if ".." in part:
                a, b = part.split("..", 1)
                lo, hi = int(a), int(b)
                if hi < lo:
                    raise UsageError(f"empty range {part!r}")
                out.extend(conv(v) for v in range(lo, hi + 1))
            else:
                out.append(conv(part))
        except ValueError as exc:
            raise UsageError(f"bad list item {part!r}: {exc}") from None
    return out


def _int_list(text):
    return parse_list(text, int)


def _str_list(choices):
    def conv(text):
        items = [s.strip() for s in text.split(",")]
        bad = [s for s in items if s not in choices]
        if bad:
            raise UsageError(f"unknown value(s) {bad}; choose from {sorted(choices)}")
        return items
    return conv


def _default_threads() -> int:
    env = os.environ.get(ENV_THREADS)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"{ENV_THREADS} must be an integer, got {env!r}") from None
        if n < 1:
            raise UsageError(f"{ENV_THREADS} must be >= 1")
        return n
    return os.cpu_count() or 1


def _out_dir(args) -> Path:
    path = args.out or os.environ.get(ENV_OUT) or "results"
    try:
        return hio.check_output_dir(path)
    except OSError as exc:
        raise UsageError(str(exc)) from None


def _emit(msg: str) -> None:
    print(msg, flush=True)


# -- subcommands -------------------------------------------------------------

def cmd_selftest(args, impl=None) -> int:
    from .selftest import N_PATTERNS, run_selftest
    results = run_selftest(long=args.long, impl=impl, log=_emit)
    if args.long:
        _emit(f"exhaustive round-trip patterns: {N_PATTERNS}")
    failures = [f for r in results for f in r.failures]
    report = {"ok": not failures, "failures": failures,
              "suites": {r.name: {"checked": r.checked, "ok": r.ok} for r in results}}
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK if not failures else EXIT_FAIL


def cmd_error_sweep(args) -> int:
    algos = args.algo
    Ns, sigmas, seeds = args.n, args.sigma, args.seeds
    if any(n < 2 for n in Ns) or any(not s > 0 for s in sigmas) or args.block < 1:
        raise UsageError("need N >= 2, sigma > 0 and block >= 1")
    out = _out_dir(args)
    threads = args.threads or _default_threads()
    cells = [(a, n, s, seed, args.block) for a in algos for n in Ns for s in sigmas for seed in seeds]
    for a, n, s, *_ in cells:
        ExperimentConfig(a, n, s, tuple(seeds), args.block)
    records = run_cells(cells, threads)
    hio.write_csv(out / "errors.csv", hio.ERRORS_COLUMNS, records)
    hio.write_metadata(out / "errors.json", seeds=seeds, block=args.block,
                       algos=algos, N=Ns, sigma=sigmas)
    for a in algos:
        for n in Ns:
            for s in sigmas:
                grp = [r for r in records if (r.algo, r.N, r.sigma) == (a, n, s)]
                _emit(f"{a} N={n} sigma={s:g}: median digits {median_digits(grp):+.3f} "
                      f"over {len(grp)} seeds")
    return EXIT_OK


def cmd_bench(args) -> int:
    modes = args.mode
    if "trailing" in modes and not args.k:
        raise UsageError("--mode trailing needs --k")
    if any(n < 1 for n in args.n) or any(k < 1 for k in (args.k or [])):
        raise UsageError("dimensions must be positive")
    out = _out_dir(args)
    threads = args.threads or _default_threads()
    records = []
    for mode in modes:
        for n in args.n:
            for s in args.sigma:
                ks = args.k if mode == "trailing" else [None]
                for k in ks:
                    rng = Rng(args.seed)
                    if mode in ("square", "trailing"):
                        r = hb.gemm_bench(mode, n, k, s, rng, args.block, threads)
                    else:
                        r = hb.factor_bench(mode, n, s, rng, args.block)
                    records.append(r)
                    _emit(f"{r.kernel} N={r.N} K={r.K} sigma={s:g}: {r.seconds:.3f}s "
                          f"{r.gflops:.4f} Gflops")
    hio.write_csv(out / "bench.csv", hio.BENCH_COLUMNS, records)
    extra = {}
    if args.counter_n:
        prof = []
        for s in hb.COUNTER_SIGMAS:
            m = hb.gemm_counter_profile(args.counter_n, args.counter_n, s, Rng(args.seed))
            prof.append({"sigma": s, "N": args.counter_n, "K": args.counter_n,
                         "mean_total_steps": m})
            _emit(f"gemm counters sigma={s:g}: {m:.2f} steps/op")
        hio.write_csv(out / "bench_counters.csv", ("sigma", "N", "K", "mean_total_steps"), prof)
        extra["counter_n"] = args.counter_n
    hio.write_metadata(out / "bench.json", seeds=[args.seed], block=args.block,
                       threads=threads, **extra)
    return EXIT_OK


def cmd_microbench(args) -> int:
    if args.samples < MIN_SAMPLES:
        raise UsageError(f"--samples must be >= {MIN_SAMPLES}")
    out = _out_dir(args)
    records = []
    for op in args.op:
        for label in args.range:
            r = range_microbench(RANGES[label], op, args.samples, Rng(args.seed),
                                 timing=not args.no_timing)
            records.append(r)
            _emit(f"{op} {label}: total_steps {r.mean_total_steps:.2f} "
                  f"(regime {r.mean_regime_iters:.2f}, shifts {r.mean_norm_shifts:.2f})")
    hio.write_csv(out / "microbench.csv", hio.MICROBENCH_COLUMNS, records)
    hio.write_metadata(out / "microbench.json", seeds=[args.seed], block=None,
                       samples=args.samples,
                       ranges={k: [RANGES[k].a, RANGES[k].b] for k in args.range})
    return EXIT_OK


def cmd_model(args) -> int:
    try:
        est = systolic_model(args.rows, args.cols, args.latency, args.fmax, args.n, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(f"PEs                  {est.n_pe}")
    _emit(f"peak                 {est.peak_gflops:.1f} Gflops")
    _emit(f"fill latency         {est.fill_cycles} cycles")
    _emit(f"utilization (K={args.k})  {est.predicted_utilization:.4f}")
    _emit(f"predicted            {est.predicted_gflops:.1f} Gflops")
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def _typed(conv):
    def wrap(text):
        try:
            return conv(text)
        except UsageError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    wrap.__name__ = getattr(conv, "__name__", "list")
    return wrap


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="positla", epilog=EPILOG,
                                formatter_class=argparse.RawDescriptionHelpFormatter,
                                description="Posit(32,2) arithmetic and linear algebra tools.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, threads=True):
        sp.add_argument("--out", help=f"output directory (env {ENV_OUT})")
        if threads:
            sp.add_argument("--threads", type=int, help=f"worker threads (env {ENV_THREADS})")

    def add(name, help_):
        return sub.add_parser(name, help=help_, epilog=EPILOG,
                              formatter_class=argparse.RawDescriptionHelpFormatter)

    s = add("selftest", "run the built-in conformance suites")
    s.add_argument("--long", action="store_true",
                   help="exhaustive 2^32 round-trip and width-8 exhaustive arithmetic")

    s = add("error-sweep", "posit vs binary32 backward-error sweep (writes errors.csv)")
    s.add_argument("--algo", type=_typed(_str_list(set(ALGOS))), default=list(ALGOS))
    s.add_argument("--n", type=_typed(_int_list), default=[256])
    s.add_argument("--sigma", type=_typed(parse_list), default=list(SWEEP_SIGMAS))
    s.add_argument("--seeds", type=_typed(_int_list), default=[1, 2, 3, 4, 5])
    s.add_argument("--block", type=int, default=64)
    common(s)

    s = add("bench", "time posit GEMM and factorizations (writes bench.csv)")
    s.add_argument("--mode", type=_typed(_str_list({"square", "trailing", "potrf", "getrf"})),
                   default=["square"])
    s.add_argument("--n", type=_typed(_int_list), default=[256])
    s.add_argument("--k", type=_typed(_int_list))
    s.add_argument("--sigma", type=_typed(parse_list), default=[1.0])
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--block", type=int, default=64)
    s.add_argument("--counter-n", type=int, default=0,
                   help="also profile instrumented GEMM counters at this size "
                        "for sigma in 1e-2,1,1e6 (writes bench_counters.csv)")
    common(s)

    s = add("microbench", "operand-range counter profile (writes microbench.csv)")
    s.add_argument("--op", type=_typed(_str_list(set(OPS))), default=list(OPS))
    s.add_argument("--range", type=_typed(_str_list(set(RANGES))), default=list(RANGES))
    s.add_argument("--samples", type=int, default=MIN_SAMPLES)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--no-timing", action="store_true", help="skip the wall-clock column")
    common(s, threads=False)

    s = add("model", "systolic-array throughput estimate")
    s.add_argument("--rows", type=int, default=16)
    s.add_argument("--cols", type=int, default=16)
    s.add_argument("--latency", type=int, default=11, help="PE latency in cycles")
    s.add_argument("--fmax", type=float, default=429.92, help="clock in MHz")
    s.add_argument("--n", type=int, default=8000)
    s.add_argument("--k", type=int, default=32)
    return p


COMMANDS = {"selftest": cmd_selftest, "error-sweep": cmd_error_sweep, "bench": cmd_bench,
            "microbench": cmd_microbench, "model": cmd_model}


def main(argv=None, impl=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if getattr(args, "threads", None) is not None and args.threads < 1:
        print("positla: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "selftest":
            return cmd_selftest(args, impl)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"positla: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
