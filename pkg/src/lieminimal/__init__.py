"""Lie-invariant energy, Euler-Lagrange residuals and Weingarten diagnostics for
surface patches in the Euclidean, spherical and hyperbolic space forms."""

__version__ = "0.1.0"

from .errors import GeometryError, UmbilicPoint
from .fixtures import builtin_fixture, list_fixtures
from .lie_energy import el_residuals, invariant_density, is_channel, lie_energy, log_gap_residual
from .spaceform import SpaceForm
from .surface import Grid, ImmersionPatch, check_coordinates, curvature_data

__all__ = [
    "GeometryError",
    "Grid",
    "ImmersionPatch",
    "SpaceForm",
    "UmbilicPoint",
    "builtin_fixture",
    "check_coordinates",
    "curvature_data",
    "el_residuals",
    "invariant_density",
    "is_channel",
    "lie_energy",
    "list_fixtures",
    "log_gap_residual",
]
