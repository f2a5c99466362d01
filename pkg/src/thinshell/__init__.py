"""Thin shells around closed surfaces: geometry, averaging, and checks."""

from .surface import (
    GeometryPack,
    OutOfTubularNeighborhood,
    Surface,
    SurfacePoints,
    closest_point,
    geometry_at,
    make_surface,
    surface_divergence,
    surface_integral,
    tangential_gradient,
    tangential_hessian,
    tangential_jacobian,
)

__all__ = [
    "GeometryPack",
    "OutOfTubularNeighborhood",
    "Surface",
    "SurfacePoints",
    "closest_point",
    "geometry_at",
    "make_surface",
    "surface_divergence",
    "surface_integral",
    "tangential_gradient",
    "tangential_hessian",
    "tangential_jacobian",
]

__version__ = "0.1.0"
