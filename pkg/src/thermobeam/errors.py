"""Exception taxonomy shared by all thermobeam modules."""


class ThermobeamError(Exception):
    """Base class for all errors raised by this package."""


class DivisionDomain(ThermobeamError):
    """Raised when a derivation formula would divide by a non-positive measure."""


class NonPositiveAlpha(ThermobeamError):
    """Raised when the effective bending stiffness b - beta^2/varrho is not positive."""


class BadMesh(ThermobeamError):
    """Raised for mesh requests that cannot produce an interior node."""


class DimensionMismatch(ThermobeamError):
    """Raised when vector/matrix dimensions disagree with the mesh."""


class SingularSystem(ThermobeamError):
    """Raised when the time-step system matrix cannot be factorized."""


class SolveFailure(ThermobeamError):
    """Raised when applying the factorization yields a non-finite solution."""


class MissingPrev(ThermobeamError):
    """Raised when an energy evaluation lacks the backward-difference seed."""


class UnsupportedVariant(ThermobeamError):
    """Raised when a diagnostic is requested for a damping variant it is not defined for."""


class DegenerateSeries(ThermobeamError):
    """Raised when a decay-rate fit window contains non-positive energies."""


class GridMismatch(ThermobeamError):
    """Raised when coarse-grid nodes are not a subset of the reference grid nodes."""


class ParseError(ThermobeamError):
    """Raised for malformed configuration text (carries line/key context)."""


class ValidationError(ThermobeamError):
    """Raised when a configuration violates model or run invariants.

    ``violations`` lists every failed check so callers can report them all at once.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
