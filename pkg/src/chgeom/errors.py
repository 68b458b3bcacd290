"""Exception types shared across the toolkit.

Every error that carries numerical evidence (a form defect, an eigenvalue
list, a failing pair) stores it on the exception instance so callers and
the CLI can report it without reparsing messages.
"""


class GeometryError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(GeometryError):
    """Vector or matrix shapes do not match the ambient dimension."""


class InvalidPointError(GeometryError):
    """A projective point with a zero (or non-finite) lift."""


class FormViolationError(GeometryError):
    """A matrix that does not preserve the Hermitian form.

    Attributes:
        defect: sup-norm of M* J M - J, scaled by the matrix size.
    """

    def __init__(self, message, defect=None):
        super().__init__(message)
        self.defect = defect


class PointClassError(GeometryError):
    """An operation received a point of the wrong sign class."""


class BorderlineClassError(GeometryError):
    """Classification is ambiguous at the working tolerance.

    Attributes:
        eigenvalues: the computed spectrum, for the caller to inspect.
    """

    def __init__(self, message, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues


class DegenerateInputError(GeometryError):
    """Input degenerate for the requested operation (identity matrix,
    coincident points, a constant point cloud, ...)."""


class PoleError(GeometryError):
    """The point is a pole of the map (inversion at its center)."""


class PointAtInfinityError(GeometryError):
    """Horospherical coordinates requested for the distinguished point
    at infinity."""


class InvalidPackingError(GeometryError):
    """Closed balls of a sphere packing are not pairwise disjoint."""


class CertificateError(GeometryError):
    """A sampled discreteness certificate failed.

    Attributes:
        pair: the (i, j) index pair that failed, when applicable.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class DegenerateCenterError(GeometryError):
    """A Dirichlet center fixed by a nontrivial group element."""


class InvarianceError(GeometryError):
    """Generators do not preserve the requested invariant model."""


class BranchBoundaryError(GeometryError):
    """Input sits on a branch boundary where the map is not smooth."""


class BudgetExceededError(GeometryError):
    """An enumeration exceeded its memory or size budget.

    Attributes:
        completed_radius: last fully enumerated word length.
        partial: records produced before the budget was hit.
    """

    def __init__(self, message, completed_radius=None, partial=None):
        super().__init__(message)
        self.completed_radius = completed_radius
        self.partial = partial
