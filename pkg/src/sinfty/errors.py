"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceCapError(RuntimeError):
    """A configured enumeration or grid cap would be exceeded."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to reach its stated accuracy."""
