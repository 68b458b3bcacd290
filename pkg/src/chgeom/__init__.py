"""chgeom: complex hyperbolic geometry and Heisenberg boundary experiments."""

from . import bending, core, dirichlet, groups, heisenberg, presets  # noqa: F401

__all__ = ["bending", "core", "dirichlet", "groups", "heisenberg", "presets"]
__version__ = "0.1.0"
