"""Dual certificates for Delsarte-type linear programming bounds on binary codes."""

from .cube import CubeMatrix, CubePoint, ValueTable, convolve, fourier, inverse_fourier, row_combination, tensor, weight
from .lp import Instance, VerificationReport, classify_general, classify_linear, verify_dual, verify_dual_linear_valued

__version__ = "0.1.0"

__all__ = [
    "CubeMatrix",
    "CubePoint",
    "Instance",
    "ValueTable",
    "VerificationReport",
    "classify_general",
    "classify_linear",
    "convolve",
    "fourier",
    "inverse_fourier",
    "row_combination",
    "tensor",
    "verify_dual",
    "verify_dual_linear_valued",
    "weight",
]
