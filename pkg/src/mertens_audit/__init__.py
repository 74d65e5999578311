"""Mobius/Mertens/totient tables, a sublinear Mertens engine, and exact
verification of polynomial inequalities built from Mertens values."""

from mertens_audit.errors import CapacityError, CorruptCacheError, DomainError
from mertens_audit.sieve import (
    MertensTable,
    MobiusTable,
    TotientTable,
    build_mertens,
    build_mobius,
    build_totient,
    check_sum_identity,
)
from mertens_audit.engine import MertensOracle, cache_load, cache_save
from mertens_audit.kernel import (
    CoefficientVector,
    coefficients,
    evaluate,
    evaluate_float,
    expand_direct,
    verify_theorem1,
    verify_theorem2,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CoefficientVector",
    "CorruptCacheError",
    "DomainError",
    "MertensOracle",
    "MertensTable",
    "MobiusTable",
    "TotientTable",
    "build_mertens",
    "build_mobius",
    "build_totient",
    "cache_load",
    "cache_save",
    "check_sum_identity",
    "coefficients",
    "evaluate",
    "evaluate_float",
    "expand_direct",
    "verify_theorem1",
    "verify_theorem2",
]
