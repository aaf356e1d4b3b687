"""Exception hierarchy shared by all modules."""


class SpatialPartError(Exception):
    """Base class for every error raised by this package."""


class NetlistError(SpatialPartError):
    """Problem with a netlist input file."""


class NetlistSyntaxError(NetlistError):
    """The file is not well-formed JSON or does not follow the schema."""

    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.field = field


class NetlistSemanticError(NetlistError):
    """Well-formed input that violates a netlist invariant."""


class ConfigError(SpatialPartError, ValueError):
    """Invalid configuration or precondition violation."""


class DegenerateGridError(SpatialPartError):
    """Grid graph with zero total node weight or edge weight."""


class InfeasibleBalanceError(SpatialPartError):
    """A 2-way split stayed outside the balance tolerance after escalation."""

    def __init__(self, message, path=""):
        super().__init__(message)
        self.path = path


class EmbeddingError(SpatialPartError):
    """Region embedding could not be computed."""

    def __init__(self, message, path=""):
        super().__init__(f"{message} [recursion path {path!r}]" if path else message)
        self.path = path


class CoverageError(SpatialPartError):
    """An assignment does not label every cell."""
