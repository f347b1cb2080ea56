"""Exact p-adic (2,2)-rational dynamics: norms, orbits, classification, ergodicity."""

from .padic import (
    DEFAULT_PRECISION,
    PadicApprox,
    PadicDynError,
    PadicInt,
    PadicSqrt,
    Radius,
    Valuation,
    VAL_INFINITY,
    format_radius,
    format_rational,
    hensel_sqrt,
    invert_unit,
    norm,
    parse_radius,
    parse_rational,
    quad_root_norms,
    valuation,
)

__version__ = "0.1.0"
