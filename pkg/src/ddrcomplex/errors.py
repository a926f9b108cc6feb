"""Exception hierarchy shared across the package."""


class DdrError(Exception):
    """Base class for every error raised by this package."""


class InputError(DdrError):
    """Invalid user-provided data (mesh file, occupancy pattern, CLI options)."""


class MeshFormatError(InputError):
    """Mesh document violates the file format (bad loop, missing key, ...)."""


class MeshTopologyError(InputError):
    """Entity incidence violates the mesh invariants (face in 0 or >2 elements, ...)."""


class MeshReferenceError(InputError):
    """Out-of-range vertex or face index in a mesh document."""


class GeometryError(InputError):
    """Degenerate or ambiguous geometry (non-planar face, zero measure, unclear sign)."""


class DomainError(DdrError, ValueError):
    """Operation applied to an incompatible space kind / dimension."""


class QuadratureDegreeError(DdrError):
    """Requested quadrature exactness exceeds what the rule builder supports."""


class ConditioningError(DdrError):
    """A local Gram or pairing system is numerically singular."""


class BasisRankError(DdrError):
    """A constructed basis does not have the dimension forced by the theory."""


class CertificationError(DdrError):
    """A computed object failed its own certificate (kernel residual, rank, ...)."""
