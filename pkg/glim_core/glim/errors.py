class BudgetExceededError(ValueError):
    """A size or memory budget would be exceeded by the requested object."""

    def __init__(self, message, budget=None, requested=None):
        super().__init__(message)
        self.budget = budget
        self.requested = requested


class EigensolverError(RuntimeError):
    """Iterative eigensolver stopped before reaching the requested residual.

    Attributes:
        best_residual (float): Largest residual among the returned Ritz pairs.
        eigenvalues (np.ndarray): Ritz values available when the solver stopped.
    """

    def __init__(self, message, best_residual=float("inf"), eigenvalues=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.eigenvalues = eigenvalues


class ConfigError(ValueError):
    pass


class FormatError(ValueError):
    pass
