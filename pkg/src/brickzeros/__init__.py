"""Exact Loschmidt-amplitude zeros of brickwork Floquet circuits.

The package computes return amplitudes of kicked XXZ-type brickwork
circuits as exact rational functions of a complexified gate parameter,
extracts certified multiprecision zero sets of their numerators, and
provides dynamical-phase-transition diagnostics built on those zeros.
"""

from .exactarith import (
    DensePoly,
    ExactArithError,
    GaussRat,
    RationalFn,
    poly_gcd,
    poly_gcd_reduce,
    squarefree_decompose,
)

__version__ = "0.1.0"

__all__ = [
    "DensePoly",
    "ExactArithError",
    "GaussRat",
    "RationalFn",
    "poly_gcd",
    "poly_gcd_reduce",
    "squarefree_decompose",
    "__version__",
]
