"""Exception types shared across the package."""


class VvvflowError(Exception):
    """Base class for all package errors."""


class ConfigError(VvvflowError):
    """Invalid configuration or violated operation precondition."""


class GridMismatchError(VvvflowError):
    """Fields defined on incompatible grids were combined."""


class SymmetryError(VvvflowError):
    """Conjugate symmetry violated, the physical field would not be real."""


class SnapshotError(VvvflowError):
    """Malformed, truncated or incompatible snapshot file."""


class DivergedError(VvvflowError):
    """A time integration blew up.

    Carries the step index, simulation time and the diagnostic that
    triggered detection.
    """

    def __init__(self, step: int, t: float, diagnostic: str):
        self.step = step
        self.t = t
        self.diagnostic = diagnostic
        super().__init__(
            f"run diverged at step {step} (t={t:.6g}): {diagnostic}"
        )
