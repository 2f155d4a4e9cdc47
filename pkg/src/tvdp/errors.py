"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input violates a domain constraint (infeasible budget, bad pmf, ...)."""


class CapacityError(ValueError):
    """A computation would exceed the supported problem size for the chosen mode."""
