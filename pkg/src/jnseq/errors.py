class DomainError(ValueError):
    """An argument lies outside the range where the checked inequality is asserted."""


class ResourceLimitError(RuntimeError):
    """The requested computation exceeds a configured enumeration cap."""


class IntegrityError(RuntimeError):
    """An internal consistency check failed (e.g. colliding push-forward atoms)."""


class SpecError(ValueError):
    """A rectangle specification or config file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
