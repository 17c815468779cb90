"""Exact Tanaka-Ito alpha-continued fraction dynamics.

Subpackages: exactnum (quadratic-field arithmetic), cfdyn (the map family),
matching (interval machinery and scans), bifurcation (membership tests and
member generators), analysis (entropy/coverage/dimension estimators),
cli (command-line front end).
"""

from .exactnum import (
    GOLDEN,
    MobiusMap,
    QuadraticNumber,
    RcfExpansion,
    parse_value,
    rcf_eval,
    rcf_expand,
    simplest_rational_between,
)

__all__ = [
    "GOLDEN",
    "MobiusMap",
    "QuadraticNumber",
    "RcfExpansion",
    "parse_value",
    "rcf_eval",
    "rcf_expand",
    "simplest_rational_between",
]

__version__ = "0.1.0"
