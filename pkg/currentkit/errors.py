"""
Error Hierarchy for CurrentKit

Every failure raised by the library derives from CurrentKitError and carries
the process exit status the command-line front end reports for it.

Author: Harsh
"""

from typing import Any, Dict, Optional


class CurrentKitError(Exception):
    """Base class for all library errors."""

    exit_code: int = 1


class InputError(CurrentKitError):
    """Invalid or degenerate input (exit status 2)."""

    exit_code = 2


class DegeneratePoints(InputError):
    """Two boundary points coincide within tolerance."""


class SharedEndpoint(InputError):
    """Two geodesics share an endpoint, so they are not transverse."""


class NotHyperbolic(InputError):
    """An operation requiring a hyperbolic element received something else."""


class EllipticElement(InputError):
    """Elliptic elements have no translation length."""


class NonPositiveDeterminant(InputError):
    """A matrix with det <= 0 cannot be normalized into SL(2,R)."""


class OverlappingIntervals(InputError):
    """The two intervals of a Liouville box are linked or share a point."""


class UnknownGenerator(InputError):
    """A word mentions a generator that the presentation does not have."""


class UnknownSurface(InputError):
    """No built-in surface with the requested name."""


class InvalidPresentation(InputError):
    """A surface presentation fails its sanity checks."""


class InvalidCurrent(InputError):
    """A discrete current has an invalid atom or weight."""


class NoCrossing(InputError):
    """A self-crossing was requested for a simple curve."""


class NonInvertible(InputError):
    """A singular matrix was given to the length-function code."""


class SpectrumPairingFailed(InputError):
    """Symplectic eigenvalues do not pair as lambda <-> 1/lambda."""


class DegenerateFamily(InputError):
    """The filling family has (numerically) zero total length."""


class InvalidRepresentation(InputError):
    """A matrix representation fails its determinant/form/relator checks."""


class InvalidLengthTable(InputError):
    """A length table is missing classes or is identically zero."""


class DegenerateBasePoint(InputError):
    """The base point on an axis hit an endpoint of a support lift."""


class ResourceLimit(CurrentKitError):
    """A configured resource cap was exceeded (exit status 3)."""

    exit_code = 3


class StepLimit(ResourceLimit):
    """An iterative procedure ran out of steps."""


class PostconditionError(CurrentKitError):
    """An internal postcondition failed (exit status 4)."""

    exit_code = 4

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ValidationFailed(PostconditionError):
    """A computed resolution did not pass its validation checks."""


class NoHyperbolicBranch(PostconditionError):
    """Surgery produced no hyperbolic output to continue from."""
