"""Exception types raised by the pipeline."""


class VolresError(Exception):
    """Base class for all errors raised by volres."""


class MassExceedsOne(VolresError, ValueError):
    """Kernel L1 mass is >= 1, so the Neumann series does not converge."""


class InvalidMass(VolresError, ValueError):
    """A mass bound handed to a certificate is outside [0, 1)."""


class IncompatibleStep(VolresError, ValueError):
    """Requested step cannot represent the kernel exactly."""


class Unsupported(VolresError, ValueError):
    """Operation is not defined for this kernel variant."""


class TolUnreachable(VolresError, ValueError):
    """Series depth needed for the requested tolerance exceeds the ceiling."""


class OutOfHorizon(VolresError, ValueError):
    """Evaluation point lies beyond the horizon the object was built for."""


class GridMismatch(VolresError, ValueError):
    """Sampled signal or grid is incompatible with the requested grid."""
