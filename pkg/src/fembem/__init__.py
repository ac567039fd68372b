"""Overlapping FEM-BEM solver for 2-D Helmholtz scattering by heterogeneous media."""

__version__ = "0.1.0"
