"""Numerical laboratory for Toeplitz products on polyanalytic Fock spaces."""
from .kernels import BACKEND
from .fock import FockVector, TruncatedBasis, kernel, kernel_from_basis, normalized_kernel
from .symbols import SymbolExpr, SymbolTerm, classify_sarason, membership, validate_orders
from .toeplitz import OperatorMatrix, norm_scan, operator_norm, toeplitz_matrix, toeplitz_product

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "FockVector",
    "OperatorMatrix",
    "SymbolExpr",
    "SymbolTerm",
    "TruncatedBasis",
    "classify_sarason",
    "kernel",
    "kernel_from_basis",
    "membership",
    "norm_scan",
    "normalized_kernel",
    "operator_norm",
    "toeplitz_matrix",
    "toeplitz_product",
    "validate_orders",
]
