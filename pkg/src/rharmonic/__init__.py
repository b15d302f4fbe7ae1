"""Workbench for rotationally symmetric r-harmonic and ES-r-harmonic maps."""

from importlib import metadata as _metadata

from . import closed_forms, condition_c, conformal_metrics, curves, equivariant, geometry, jets, numerics, spectrum
from .equivariant import Profile, ReducedProblem, el_residual, lagrangian, reduced_energy
from .geometry import ModelManifold, SurfaceOfRevolution, WarpFunction

try:
    __version__ = _metadata.version("artifact")
except _metadata.PackageNotFoundError:
    __version__ = "0.0.0"

__all__ = [
    "closed_forms",
    "condition_c",
    "conformal_metrics",
    "curves",
    "equivariant",
    "geometry",
    "jets",
    "numerics",
    "spectrum",
    "Profile",
    "ReducedProblem",
    "ModelManifold",
    "SurfaceOfRevolution",
    "WarpFunction",
    "el_residual",
    "lagrangian",
    "reduced_energy",
]
