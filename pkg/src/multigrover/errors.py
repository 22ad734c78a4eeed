"""Exception hierarchy for the package."""


class GroverError(Exception):
    """Base class for all package errors."""


class DimensionError(GroverError, ValueError):
    """Operand dimensions disagree or violate a size constraint."""


class NormalizationError(GroverError, ValueError):
    """A state that must have unit norm does not."""


class ResourceLimitError(GroverError):
    """A dense materialization would exceed the configured size limit."""


class InvalidUnitaryError(GroverError, ValueError):
    """A loaded operator failed its unitarity check."""


class InvalidTargetError(GroverError, ValueError):
    """Target indices are empty, duplicated, or out of range."""


class OrthogonalStartError(GroverError):
    """V|gamma> has (numerically) no component in the target subspace, so a = 0."""


class NumericalConsistencyError(GroverError):
    """A computed probability fell outside [0, 1] beyond rounding slack."""


class DegenerateSubspaceError(GroverError):
    """The spanning vectors of the invariant subspace are numerically dependent."""


class PrecheckError(GroverError):
    """The start-state precheck did not return ``Proceed``.

    The verdict is available as ``self.verdict``.
    """

    def __init__(self, verdict):
        super().__init__(f"precheck verdict: {verdict.value}")
        self.verdict = verdict
