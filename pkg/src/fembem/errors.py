"""Exception hierarchy shared by all solver layers."""


class FemBemError(Exception):
    """Base class for every error raised by the package."""


class GeometryError(FemBemError):
    """Invalid curve, mesh or medium description."""


class MeshError(GeometryError):
    """Mesh file or mesh topology violates an invariant."""


class ConfigurationError(FemBemError):
    """The FEM/BEM configuration is not admissible (e.g. broken nesting)."""


class AssemblyError(FemBemError):
    """A finite element matrix could not be assembled."""


class ResonanceError(FemBemError):
    """The interior Dirichlet problem is numerically singular."""


class LocationError(FemBemError):
    """A point could not be located in the mesh or lies in the wrong region."""


class SolverError(FemBemError):
    """An iterative or direct interface solve failed."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []
