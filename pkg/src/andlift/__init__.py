"""andlift: exact desk-scale toolkit for monotone block sensitivity,
hitting sets, AND-decision trees and AND-function communication matrices."""

__version__ = "0.1.0"

from .poly import (  # noqa: F401
    BitVec,
    MultilinearPoly,
    TruthTable,
    evaluate,
    l1_norm,
    mobius_invert,
    restrict_ones,
    restrict_zero,
    to_table,
)
