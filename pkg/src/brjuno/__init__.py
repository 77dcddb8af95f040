"""Continued fractions with a shifted digit window, Brjuno sums, a
transfer-operator bench on grid functions, the complexified Brjuno
function, and Lindstedt series for standard-family maps."""

from .exactreal import QuadraticSurd, MPFloat, as_real, parse_real, golden_mean
from .cf import CFExpansion, expand, gauss_step, reconstruct, growth_rate
from .series import (
    SeriesFunction,
    BrjunoEval,
    neg_log,
    brjuno_series,
    brjuno_B,
    brjuno_Be,
)
from .gridop import (
    GridFunction,
    apply_T,
    neumann_inverse,
    neg_log_grid,
    holder_norm,
    contraction_check,
    lemma_check,
    bmo_seminorm,
)
from .complexbf import (
    dilog,
    cauchy_F,
    periodize,
    transfer_once,
    MonoidElement,
    monoid_enumerate,
    Lg_action,
    TruncationPolicy,
    ComplexBrjunoResult,
    complex_brjuno,
    boundary_scan,
)
from .lindstedt import (
    SmallDivisor,
    small_divisor,
    LindstedtSeries,
    semi_standard_series,
    standard_map_series,
    critical_constant_estimate,
    default_bits,
)

__version__ = "0.1.0"

__all__ = [
    "QuadraticSurd",
    "MPFloat",
    "as_real",
    "parse_real",
    "golden_mean",
    "CFExpansion",
    "expand",
    "gauss_step",
    "reconstruct",
    "growth_rate",
    "SeriesFunction",
    "BrjunoEval",
    "neg_log",
    "brjuno_series",
    "brjuno_B",
    "brjuno_Be",
    "GridFunction",
    "apply_T",
    "neumann_inverse",
    "neg_log_grid",
    "holder_norm",
    "contraction_check",
    "lemma_check",
    "bmo_seminorm",
    "dilog",
    "cauchy_F",
    "periodize",
    "transfer_once",
    "MonoidElement",
    "monoid_enumerate",
    "Lg_action",
    "TruncationPolicy",
    "ComplexBrjunoResult",
    "complex_brjuno",
    "boundary_scan",
    "SmallDivisor",
    "small_divisor",
    "LindstedtSeries",
    "semi_standard_series",
    "standard_map_series",
    "critical_constant_estimate",
    "default_bits",
]
