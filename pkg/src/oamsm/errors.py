"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration: bad key, constraint violation, or a parameter
    combination the model cannot support (e.g. no matching beam waist)."""


class NumericError(RuntimeError):
    """A numerical routine failed to reach its accuracy target.

    Carries the best available estimate and an error bound so callers can
    decide whether the partial result is still usable.
    """

    def __init__(self, message: str, estimate: float, bound: float):
        super().__init__(f"{message} (estimate={estimate!r}, bound={bound!r})")
        self.estimate = estimate
        self.bound = bound
