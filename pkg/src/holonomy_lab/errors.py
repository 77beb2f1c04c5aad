"""Error types shared across the package.

Every failure mode that callers are expected to handle has its own class so
that tests and the CLI can distinguish them without string matching.
"""


class HolonomyLabError(Exception):
    """Base class for all package-specific errors."""


class NotUnimodular(HolonomyLabError):
    """Integer matrix whose determinant is not +-1."""


class ComplexSpectrum(HolonomyLabError):
    """Matrix with a non-real eigenvalue; the real splitting does not exist."""


class NotHyperbolic(HolonomyLabError):
    """Matrix with an eigenvalue of modulus one."""


class RepeatedEigenvalue(HolonomyLabError):
    """Matrix with a repeated eigenvalue; simple spectrum is required."""


class HorizonExceeded(HolonomyLabError):
    """An iteration count walked past the configured horizon."""


class TooFarApart(HolonomyLabError):
    """Bracket requested for points outside the local product radius."""


class NotSameLeaf(HolonomyLabError):
    """Leaf-wise quantity requested for points on different leaves."""


class DegenerateCurve(HolonomyLabError):
    """Curve with no nonzero piece where a positive length is required."""


class RemainderShort(HolonomyLabError):
    """Threshold search ran off the end of the curve before reaching it."""


class TooLarge(HolonomyLabError):
    """Rectangle input data exceeds the certified local scale."""


class PseudoIsometryViolated(HolonomyLabError):
    """Measured holonomy distortion exceeded its certified bound."""


class BoundaryMismatch(HolonomyLabError):
    """Gluing requested along boundaries that do not coincide."""


class BlowUp(HolonomyLabError):
    """Unstable length grew past the certified (1+eps) envelope."""


class ConfigInvalid(HolonomyLabError):
    """Experiment configuration violates a validity constraint."""


class UnsupportedDimension(HolonomyLabError):
    """Geometric rendering requested for a system that is not 2-D."""


class IoFailure(HolonomyLabError):
    """Report or manifest could not be written."""
