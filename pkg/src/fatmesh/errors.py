"""Exception hierarchy for the fatmesh package."""


class FatmeshError(Exception):
    """Base class for all fatmesh errors."""


class InvalidInputError(FatmeshError):
    """Input violates a precondition (dimension mismatch, bad arity, ...)."""


class EmptyInputError(FatmeshError):
    """Operation received an empty complex or empty sample set."""


class ProjectionError(FatmeshError):
    """Closest-point projection failed to converge.

    Carries the last iterate so callers can inspect where the solver stalled.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class SingularPointError(FatmeshError):
    """Manifold constraint Jacobian is rank deficient at the query point."""


class ScheduleInfeasibleError(FatmeshError):
    """Mesh-size schedule constraints conflict; names the failing stage."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage


class EmptyRegionError(FatmeshError):
    """Region produced no usable sample points."""


class DensityError(FatmeshError):
    """Witness sampling too coarse: a site received no witnesses."""

    def __init__(self, message, site=None):
        super().__init__(message)
        self.site = site


class DegeneracyError(FatmeshError):
    """Cospherical site degeneracy survived symbolic perturbation."""


class ConnectivityEstimationError(FatmeshError):
    """Sample set disconnected at the sampling scale; no radius is estimable."""


class ExhaustionStallError(FatmeshError):
    """Local tubular-radius estimate collapsed below the floor at some stage."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage


class MashError(FatmeshError):
    """Boundary-ring fitting between two stage meshes failed."""


class ExportError(FatmeshError):
    """Mesh cannot be written in the requested format."""


class MeshFileError(FatmeshError):
    """Mesh file is malformed or uses an unsupported construct."""


class ConfigError(FatmeshError):
    """Run configuration failed validation; names the offending field."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class CertificationError(FatmeshError):
    """Produced mesh does not meet the requested thickness floor."""
