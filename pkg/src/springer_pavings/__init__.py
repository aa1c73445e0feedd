"""Affine-space pavings of affine Springer fibers for GL_d, d <= 4.

Exact lattice models over truncated Laurent series, Iwahori cell
combinatorics, the slice pavings for GL3/GL4, and purity certificates by
point counting over several prime fields.
"""

from springer_pavings.series import (
    PrimeField,
    TruncSeries,
    PrecisionError,
    FieldMismatchError,
)

__all__ = [
    "PrimeField",
    "TruncSeries",
    "PrecisionError",
    "FieldMismatchError",
]

__version__ = "0.1.0"
