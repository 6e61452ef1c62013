"""Exception types raised by the numerical kernels and optimizers."""
import numpy as np


class AsgoError(Exception):
    """Base class for errors raised by this package."""


class NonFiniteError(AsgoError, FloatingPointError):
    """A NaN or Inf showed up in an input or intermediate value."""


class NotPSDError(AsgoError, np.linalg.LinAlgError):
    """Matrix expected positive semidefinite has a clearly negative eigenvalue."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class SingularMatrixError(AsgoError, np.linalg.LinAlgError):
    """An inverse (or negative power) of a singular matrix was requested."""


class ConvergenceError(AsgoError, np.linalg.LinAlgError):
    """Iteration cap reached before the requested accuracy."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


class DivergenceError(AsgoError, FloatingPointError):
    """An iterative kernel produced non-finite values."""

    def __init__(self, message, iteration):
        super().__init__(f"{message} at iteration {iteration}")
        self.iteration = iteration


class CapExceededError(AsgoError, ValueError):
    """A size cap guarding an O(d^2) or combinatorial allocation was exceeded."""
