"""Exception types shared across the package."""


class SpecError(ValueError):
    """A network description is malformed or internally inconsistent."""


class DimensionMismatch(SpecError):
    """A state, neighbor or input vector has the wrong length."""


class MissingInitialState(SpecError):
    """An initial window lacks a value required by the dependency cone."""

    def __init__(self, index: int):
        super().__init__(f"no initial state for subsystem {index}")
        self.index = index


class InputBoundExceeded(SpecError):
    """An input sample exceeded the declared sup norm of the signal."""


class GainDomainError(ValueError):
    """A comparison function was evaluated outside its domain."""


class CertificateRefused(ValueError):
    """A certificate constructor declined because a margin condition fails."""

    def __init__(self, message: str, margin: float):
        super().__init__(message)
        self.margin = margin
