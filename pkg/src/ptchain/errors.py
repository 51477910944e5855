"""Exception types shared across the package."""


class SpecError(ValueError):
    """A Hamiltonian description is malformed or violates a precondition."""


class ConvergenceError(ArithmeticError):
    """An iterative numerical routine failed to converge.

    Attributes
    ----------
    diagnostic : dict
        Whatever partial state the routine could report (iterates, last
        update size, iteration count).
    """

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = dict(diagnostic or {})


class AmbiguousClusterError(ArithmeticError):
    """Root clustering near a target could not settle on a multiplicity."""

    def __init__(self, message, window=None):
        super().__init__(message)
        self.window = window
