"""Numerical checks of fractional Hardy and Korn inequalities for vector fields."""
from .core import Domain, DomainTag, Family, FieldSpec, FracParams, Smoothness, field_library
from .errors import (BoundaryContact, DegeneratePair, DomainError, ExcludedParameter, InvalidParameter,
                     NonlocalKornError, NullSeminorm, UnsupportedField)
from .quad import Estimate, QuadConfig, hardy_norm, seminorm_S, seminorm_W

__version__ = "0.1.0"

__all__ = [
    "BoundaryContact", "DegeneratePair", "Domain", "DomainError", "DomainTag", "Estimate", "ExcludedParameter",
    "Family", "FieldSpec", "FracParams", "InvalidParameter", "NonlocalKornError", "NullSeminorm", "QuadConfig",
    "Smoothness", "UnsupportedField", "field_library", "hardy_norm", "seminorm_S", "seminorm_W",
]
