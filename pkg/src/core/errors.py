"""Exception hierarchy shared by every simulator component."""

from typing import Optional, Tuple


class QtpError(Exception):
    """Base class for all simulator errors"""


class ConfigurationError(QtpError, ValueError):
    """A parameter violates a precondition or invariant"""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        self.detail = message
        super().__init__(f"{path}: {message}" if path else message)


class GridMismatchError(QtpError, ValueError):
    """Two fields, maps or bases are not sampled on the same grid"""


class UndefinedCorrelationError(QtpError, ArithmeticError):
    """Correlation or contrast requested on a constant / zero-mean region"""


class EmptyBasisError(QtpError):
    """No guided mode was found in the numerical window"""


class RootBracketError(QtpError):
    """Characteristic-equation root could not be bracketed"""

    def __init__(self, azimuthal_order: int, neff_interval: Tuple[float, float], detail: str = ""):
        self.azimuthal_order = azimuthal_order
        self.neff_interval = neff_interval
        lo, hi = neff_interval
        msg = f"root bracketing failed for l={azimuthal_order} in n_eff interval [{lo:.9f}, {hi:.9f}]"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ModeMatchingError(QtpError):
    """A mode could not be identified across wavelengths"""

    def __init__(self, mode_label: str, overlap: float):
        self.mode_label = mode_label
        self.overlap = overlap
        super().__init__(f"mode {mode_label} has no partner with |overlap| >= 0.5 (best {overlap:.3f})")


class UnderSamplingError(QtpError):
    """A kernel or source is not resolved by the simulation grid"""


class ExperimentError(QtpError):
    """Raised by the runner when an experiment cannot complete"""

    def __init__(self, message: str, manifest=None):
        self.manifest = manifest
        super().__init__(message)
