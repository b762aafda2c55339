"""Exception types and mask reason codes shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SingularParameterError(DomainError):
    """A derived quantity is undefined at the given channel parameters."""


class IterationLimitError(RuntimeError):
    """A series did not converge within its term budget.

    Carries the partial sum and the last term so the caller can judge how
    far off the truncated value is.
    """

    def __init__(self, message, partial_sum, last_term):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.last_term = last_term


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured size guard."""


class NumericsError(RuntimeError):
    """An internal numerical consistency check failed (construction bug)."""


# Reason codes attached to masked bound values.  A masked cell carries
# exactly one of these; when several apply they are assigned in the
# priority order listed here.
LEMMA1_INVALID = "LEMMA1_INVALID"
NT_LE_ETA = "NT_LE_ETA"
Q_GE_1 = "Q_GE_1"
C_CLASSICAL_ZERO = "C_CLASSICAL_ZERO"

REASON_PRIORITY = (LEMMA1_INVALID, NT_LE_ETA, Q_GE_1, C_CLASSICAL_ZERO)


class MaskedPointError(RuntimeError):
    """A bound is undefined at the requested parameter point.

    Not an error condition in sweeps: callers catch it and record the
    reason code instead of a value.
    """

    def __init__(self, reason, message=""):
        super().__init__(message or reason)
        self.reason = reason
