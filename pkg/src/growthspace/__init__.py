"""Growth functions, weight sequences and a finite Fock-space model, with numerical verification suites."""
from .errors import ConfigError, GrowthSpaceError
from .growth_functions import (
    Flags,
    GrowthFunction,
    beta_exp,
    check_condition,
    dual_legendre,
    dual_of,
    equivalence_witness,
    iterated_exp,
    legendre,
    legendre_series,
    parse_function_spec,
    pure_exp,
    reciprocal_series,
    w_sqrt_log,
)
from .results import CheckResult, VerificationReport
from .weight_sequences import (
    WeightSequence,
    bell_numbers,
    check,
    factorial_power,
    generating_function,
    ones,
    parse_sequence_spec,
    weights_from_growth,
)

__all__ = [
    "CheckResult",
    "ConfigError",
    "Flags",
    "GrowthFunction",
    "GrowthSpaceError",
    "VerificationReport",
    "WeightSequence",
    "bell_numbers",
    "beta_exp",
    "check",
    "check_condition",
    "dual_legendre",
    "dual_of",
    "equivalence_witness",
    "factorial_power",
    "generating_function",
    "iterated_exp",
    "legendre",
    "legendre_series",
    "ones",
    "parse_function_spec",
    "parse_sequence_spec",
    "pure_exp",
    "reciprocal_series",
    "w_sqrt_log",
    "weights_from_growth",
]
__version__ = "0.1.0"
