"""Exception types raised across the package."""


class InnError(Exception):
    """Base class for all package errors."""


class ContractError(InnError, ValueError):
    """An argument violates a documented precondition (shape, range, emptiness)."""


class NumericalError(InnError, ArithmeticError):
    """A numerical routine (e.g. SVD) failed to converge."""


class DegenerateNodeError(InnError, ValueError):
    """A hidden node output vector has (numerically) zero norm."""


class EmptyPoolError(InnError, RuntimeError):
    """Every drawn candidate node was degenerate."""


class ParseError(InnError, ValueError):
    """Malformed input file or configuration."""


class DegenerateDistributionError(InnError, ValueError):
    """A sample cannot support a density estimate (e.g. all values equal)."""
