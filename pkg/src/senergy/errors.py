"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A numeric parameter is outside its admissible range."""


class PolicyError(ValueError):
    """A motion policy was given inconsistent inputs (e.g. a bad matrix)."""


class InvalidStepError(ValueError):
    """A step failed constraint validation; carries the offending report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class CertificateViolation(RuntimeError):
    """A clearing pass produced a negative donation or a failed invariant."""


class PaymentFailure(CertificateViolation):
    """The adjacent-pair leftover could not cover the step's energy."""


class OutOfRegimeError(ValueError):
    """Closed-form estimate requested outside its guaranteed regime."""


class DepthCapExceeded(RuntimeError):
    """A recurrence failed to terminate within the configured depth cap."""
