"""Kernel functions and quadrature domains of planar domains."""

from ._qdk import (
    Ahlfors,
    AlgebraError,
    Bergman,
    CapacityError,
    ConsistencyError,
    Domain,
    DomainError,
    Error,
    GeometryError,
    Grid,
    NumericalError,
    ParseError,
    ProximityError,
    Schwarz,
    Szego,
    UsageError,
    ahlfors,
    discretize,
    gustafsson_check,
    representative_map,
    szego,
    verify,
)

__all__ = [
    "Ahlfors",
    "AlgebraError",
    "Bergman",
    "CapacityError",
    "ConsistencyError",
    "Domain",
    "DomainError",
    "Error",
    "GeometryError",
    "Grid",
    "NumericalError",
    "ParseError",
    "ProximityError",
    "Schwarz",
    "Szego",
    "UsageError",
    "ahlfors",
    "discretize",
    "gustafsson_check",
    "representative_map",
    "szego",
    "verify",
]
