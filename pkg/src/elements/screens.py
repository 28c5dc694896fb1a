"""
Random thin phase screens: diffusers and multi-core fibers.

A screen stores one thickness per macro-pixel and expands it onto the field
grid on demand.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core.errors import ConfigurationError, GridMismatchError
from ..core.rng import philox
from ..optics.field import Grid
from .material import MaterialModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhaseScreen:
    thickness: np.ndarray = field(repr=False)   # meters, one value per macro-pixel
    macro_pixel: float
    pitch: float
    material: MaterialModel
    seed: Optional[int] = None
    kind: str = "diffuser"

    def __post_init__(self):
        thickness = np.array(self.thickness, dtype=np.float64, copy=True)
        if thickness.ndim != 2:
            raise ConfigurationError(f"thickness must be 2D, got {thickness.shape}", "screen.thickness")
        if np.any(thickness < 0):
            raise ConfigurationError("thickness must be >= 0", "screen.thickness")
        samples_per_pixel(self.macro_pixel, self.pitch)
        thickness.setflags(write=False)
        object.__setattr__(self, "thickness", thickness)

    @property
    def factor(self) -> int:
        return samples_per_pixel(self.macro_pixel, self.pitch)

    def sampled(self, grid: Grid) -> np.ndarray:
        """Thickness on every sample of `grid` (centred crop of the expanded screen)"""
        if not np.isclose(grid.pitch, self.pitch, rtol=1e-9, atol=0.0):
            raise GridMismatchError(f"screen pitch {self.pitch:.4e} m differs from grid pitch {grid.pitch:.4e} m")
        expanded = np.kron(self.thickness, np.ones((self.factor, self.factor)))
        if expanded.shape[0] < grid.size or expanded.shape[1] < grid.size:
            raise GridMismatchError(f"screen covers {expanded.shape} samples, grid needs {grid.shape}")
        r0 = (expanded.shape[0] - grid.size) // 2
        c0 = (expanded.shape[1] - grid.size) // 2
        return expanded[r0:r0 + grid.size, c0:c0 + grid.size]


def samples_per_pixel(macro_pixel: float, pitch: float) -> int:
    if not macro_pixel > 0 or not pitch > 0:
        raise ConfigurationError(f"macro-pixel and pitch must be > 0, got {macro_pixel}, {pitch}", "screen.macro_pixel")
    ratio = macro_pixel / pitch
    factor = int(round(ratio))
    if factor < 1 or abs(ratio - factor) > 1e-6 * ratio:
        raise ConfigurationError(
            f"macro-pixel {macro_pixel:.4e} m is not an integer multiple of pitch {pitch:.4e} m", "screen.macro_pixel")
    return factor


def _pixel_count(grid: Grid, factor: int) -> int:
    return -(-grid.size // factor)


def generate_diffuser(grid: Grid, macro_pixel: float, thickness_max: float, material: MaterialModel,
                      seed: int) -> PhaseScreen:
    """I.i.d. uniform thickness in [0, thickness_max] per macro-pixel"""
    if not thickness_max >= 0:
        raise ConfigurationError(f"thickness_max must be >= 0, got {thickness_max}", "diffuser.thickness_max")
    factor = samples_per_pixel(macro_pixel, grid.pitch)
    n = _pixel_count(grid, factor)
    rng = philox(seed)
    thickness = rng.uniform(0.0, thickness_max, size=(n, n)) if thickness_max > 0 else np.zeros((n, n))
    return PhaseScreen(thickness, macro_pixel, grid.pitch, material, seed, "diffuser")


def generate_mcf_screen(grid: Grid, core_pitch: float, path_spread: float, material: MaterialModel,
                        seed: int, wavelength: float) -> PhaseScreen:
    """Multi-core fiber as one thin screen: every core adds a random optical path.

    Optical paths (n - 1) L are uniform in [0, path_spread] at `wavelength`.
    """
    if not path_spread >= 0:
        raise ConfigurationError(f"path spread must be >= 0, got {path_spread}", "mcf.path_spread")
    factor = samples_per_pixel(core_pitch, grid.pitch)
    n = _pixel_count(grid, factor)
    rng = philox(seed)
    paths = rng.uniform(0.0, path_spread, size=(n, n))
    thickness = paths / (material.index(wavelength) - 1.0)
    logger.debug("mcf screen: %d x %d cores, path spread %.3e m", n, n, path_spread)
    return PhaseScreen(thickness, core_pitch, grid.pitch, material, seed, "mcf")
