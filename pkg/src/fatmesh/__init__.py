"""fatmesh: uniformly thick triangulations of embedded manifolds."""

from .geometry import (
    Simplex,
    SimplicialComplex,
    ThicknessReport,
    complex_thickness,
    simplex_diameter,
    simplex_volume,
    thickness,
    validate_complex,
)

__all__ = [
    "Simplex",
    "SimplicialComplex",
    "ThicknessReport",
    "complex_thickness",
    "simplex_diameter",
    "simplex_volume",
    "thickness",
    "validate_complex",
]

__version__ = "0.1.0"
