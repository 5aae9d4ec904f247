"""Exception types shared across the package."""

import numpy as np


class ValidationError(ValueError):
    """An input value violates a documented precondition."""


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """A collocation matrix failed its Cholesky factorization."""


class ConvergenceError(RuntimeError):
    """An iterative spectral estimate exceeded its iteration cap."""


class FitError(ValueError):
    """A decay-fit window holds too few usable points."""


class ConfigError(ValueError):
    """An experiment configuration is malformed or out of range."""
