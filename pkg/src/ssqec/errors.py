"""Exception types shared across the library.

The CLI maps these onto exit codes; library code raises them directly.
"""


class SsqecError(Exception):
    """Base class for all library errors."""


class ContractViolationError(SsqecError):
    """An operation was called with arguments violating its contract
    (dimension mismatch, nonzero syndrome where zero is required, ...)."""


class InvalidParameterError(SsqecError):
    """A user-facing parameter is out of range (bad lattice size, bad probability)."""


class UnsupportedMatrixError(SsqecError):
    """A parity-check matrix does not have the column structure a matching
    graph requires (column weight must be 1 or 2)."""


class InvalidSyndromeError(SsqecError):
    """A defect set cannot be matched (odd count with no boundary)."""


class UnsupportedSizeError(SsqecError):
    """An exact computation was requested beyond its feasible size cap."""


class FitFailureError(SsqecError):
    """A threshold fit did not converge or the data contradicts the ansatz."""
