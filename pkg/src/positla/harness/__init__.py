from .bench import BenchRecord, factor_bench, flop_count, gemm_bench
from .experiments import (
    ErrorRecord,
    ExperimentConfig,
    backward_error,
    digits_advantage,
    gen_normal,
    make_spd,
    median_digits,
    run_error_experiment,
)
from .microbench import RANGES, CounterSummary, RangeSpec, range_microbench
from .rng import RNG_NAME, Rng
from .systolic import SystolicEstimate, systolic_model
