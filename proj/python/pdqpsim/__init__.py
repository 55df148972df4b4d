"""Exact simulation of quantum computation with non-collapsing measurements.

The native module carries the state engine, the line protocol on quantum or
randomized advice, and the companion demos (collision finding, cube-root
Grover search, the index communication protocol).
"""

from ._core import (
    BooleanFunction,
    __version__,
    advice_qubit_cost,
    default_sample_cap,
    expected_coupon_samples,
    find_collision,
    grover_marked_probability,
    grover_search,
    index_query,
    interpolate_at_zero,
    mle_eval,
    pdqexp_eval,
    ray_canonical,
    run_experiment,
    run_protocol,
    select_prime,
)

__all__ = [
    "BooleanFunction",
    "__version__",
    "advice_qubit_cost",
    "default_sample_cap",
    "expected_coupon_samples",
    "find_collision",
    "grover_marked_probability",
    "grover_search",
    "index_query",
    "interpolate_at_zero",
    "mle_eval",
    "pdqexp_eval",
    "ray_canonical",
    "run_experiment",
    "run_protocol",
    "select_prime",
]
