"""Finite-volume solver and principle checker for the evolution p-Laplacian with a zero-order term."""

from .errors import PlapError
from .grid import Field, Grid, ProblemSpec, SpaceTimeField, TimeMesh, build_grid

__all__ = ["PlapError", "Field", "Grid", "ProblemSpec", "SpaceTimeField", "TimeMesh", "build_grid"]
__version__ = "0.1.0"
