"""Certified heights, Northcott bounds and finiteness censuses."""

from .algebraic import AlgebraicNumber, IntPolynomial, root_of, roots_of
from .certified import CertifiedValue
from .errors import DivisionByZero, DomainError, NkitError, NotAMorphism, ResourceError
from .heights import HeightKind, height, house, l2_height, projective_height, weil_height

__all__ = [
    "AlgebraicNumber",
    "CertifiedValue",
    "DivisionByZero",
    "DomainError",
    "HeightKind",
    "IntPolynomial",
    "NkitError",
    "NotAMorphism",
    "ResourceError",
    "height",
    "house",
    "l2_height",
    "projective_height",
    "root_of",
    "roots_of",
    "weil_height",
]
