"""Exact resonance counting and norm-inflation experiments on tori."""

from ._reslab import (
    BudgetError,
    DomainError,
    Error,
    OverflowError,
    PrecisionError,
    WitnessNotFound,
    build_airy_witness,
    count_airy,
    count_airy_restricted,
    count_gamma,
    find_dc_witness,
    lcm_range,
    picard_coefficient,
    picard_l2_norm,
    picard_split,
    run_cli,
    set_thread_count,
    strichartz_norm,
    thread_count,
    totient_sum_ratio,
    version,
)

__version__ = version()

__all__ = [
    "BudgetError",
    "DomainError",
    "Error",
    "OverflowError",
    "PrecisionError",
    "WitnessNotFound",
    "build_airy_witness",
    "count_airy",
    "count_airy_restricted",
    "count_gamma",
    "find_dc_witness",
    "lcm_range",
    "picard_coefficient",
    "picard_l2_norm",
    "picard_split",
    "run_cli",
    "set_thread_count",
    "strichartz_norm",
    "thread_count",
    "totient_sum_ratio",
    "version",
]
