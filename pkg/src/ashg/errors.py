"""Shared error types."""


class AshgError(Exception):
    pass


class ParseError(AshgError):
    """Malformed instance, partition, or decomposition text."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class PreconditionError(AshgError):
    """A caller violated an operation's contract."""


class ResourceLimitError(AshgError):
    """A configured enumeration or state cap was exceeded."""

    def __init__(self, cap_name, cap_value):
        super().__init__("resource cap exceeded: %s=%d" % (cap_name, cap_value))
        self.cap_name = cap_name
        self.cap_value = cap_value


class WrongAlgorithmError(AshgError):
    """The instance does not have the structure the algorithm needs."""
