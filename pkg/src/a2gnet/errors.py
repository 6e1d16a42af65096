"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class OutOfEnvelopeError(DomainError):
    """Altitude outside the modeled 0-300 m air-to-ground envelope."""


class ApplicabilityError(DomainError):
    """Geometry outside a model's stated validity window.

    Carries the violated bound so callers can report or clamp.
    """

    def __init__(self, message, *, quantity=None, value=None, bound=None):
        super().__init__(message)
        self.quantity = quantity
        self.value = value
        self.bound = bound


class ModelGapError(DomainError):
    """Parameter combination the source models leave undefined."""


class ScenarioError(ValueError):
    """Scenario configuration rejected; carries the offending key path."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class GridParseError(ValueError):
    """Malformed ESRI ASCII grid; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")
