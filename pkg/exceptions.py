from typing import Optional


class ReadoutError(Exception):
    """Base for every error raised by the read-out simulator."""


class ConfigError(ReadoutError):
    """Exception raised when a configuration is malformed or invalid
    Reason is given as the exception message, naming the violated invariant
    """


class DomainError(ReadoutError):
    """Exception raised when a request is physically impossible
    Reason is given as the exception message

    `cycle` is attached by the autorange loop when the failure happened
    while trying a resistor.
    """

    cycle: Optional[int] = None

    def __str__(self) -> str:
        message = super().__str__()
        if self.cycle is not None:
            return f"cycle {self.cycle}: {message}"
        return message


class TriodeDomainError(DomainError):
    """V_ds left the triode interval of a bank resistor."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class SolverError(DomainError):
    """The bottom-node solve did not converge."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class SelectorSaturated(DomainError):
    """The shift-register selector cannot step past the top resistor."""


class OverRange(DomainError):
    """Input current is larger than the read-out can digitise."""

    def __init__(self, message: str, v_out: float):
        super().__init__(message)
        self.v_out = v_out


class UnderRange(DomainError):
    """Input current is too small to lock even on the largest resistor."""

    def __init__(self, message: str, v_out: float):
        super().__init__(message)
        self.v_out = v_out


class DecodeError(DomainError):
    """A code decodes below the amplifier common mode (negative current)."""


class MismatchError(DomainError):
    """Mismatch draws kept producing non-positive capacitances."""
