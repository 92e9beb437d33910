"""Exception hierarchy shared across the package."""


class DirichletLabError(Exception):
    """Base class for all errors raised by dirichletlab."""


class ValidationError(DirichletLabError):
    """Invalid argument, configuration key, or input file."""


class ResourceBudgetError(DirichletLabError):
    """A computation would exceed the configured term/memory budget."""


class DivergenceError(DirichletLabError):
    """A tail or series requested at an exponent where it diverges."""
