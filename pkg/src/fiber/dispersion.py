"""
Cross-wavelength mode identification and propagation-constant derivatives.

Derivatives are taken with respect to angular frequency by central
differences of solved bases, Richardson-extrapolated and refined by step
halving until two successive estimates agree to 1%.
"""

import logging
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from ..core.errors import ConfigurationError, GridMismatchError, ModeMatchingError
from ..optics.field import Grid
from ..optics.spectral import omega_from_wavelength, wavelength_from_omega
from .modes import FiberSpec, ModeBasis, solve_modes

logger = logging.getLogger(__name__)

Solver = Callable[[FiberSpec, float, Grid], ModeBasis]

MIN_MATCH_OVERLAP = 0.5
INITIAL_OMEGA_STEP = 1e13       # rad/s, about 3.5 nm at 810 nm
MAX_HALVINGS = 6
REL_TOLERANCE = 0.01


def match_modes(reference: ModeBasis, other: ModeBasis) -> np.ndarray:
    """Index into `other` for every mode of `reference`, greedy on |overlap|"""
    if reference.grid != other.grid:
        raise GridMismatchError("mode matching needs both bases on the same grid")
    overlap = np.abs(reference.matrix @ other.matrix.T) * reference.grid.pitch ** 2
    order = np.argsort(overlap, axis=None)[::-1]
    rows, cols = np.unravel_index(order, overlap.shape)
    assigned = np.full(len(reference), -1)
    taken = np.zeros(len(other), dtype=bool)
    remaining = len(reference)
    for r, c in zip(rows, cols):
        if remaining == 0 or overlap[r, c] < MIN_MATCH_OVERLAP:
            break
        if assigned[r] >= 0 or taken[c]:
            continue
        assigned[r] = c
        taken[c] = True
        remaining -= 1
    missing = np.nonzero(assigned < 0)[0]
    if missing.size:
        n = int(missing[0])
        raise ModeMatchingError(reference.modes[n].label, float(overlap[n].max()) if len(other) else 0.0)
    return assigned


class _BetaSampler:
    """Solved, matched betas at omega0 + offset, memoised per offset"""

    def __init__(self, fiber: FiberSpec, wavelength: float, grid: Grid, solver: Solver,
                 reference: Optional[ModeBasis] = None):
        self.fiber = fiber
        self.grid = grid
        self.solver = solver
        self.omega0 = omega_from_wavelength(wavelength)
        self.reference = reference if reference is not None else solver(fiber, wavelength, grid)
        self._cache: Dict[float, np.ndarray] = {0.0: self.reference.betas}

    def __call__(self, offset: float) -> np.ndarray:
        if offset not in self._cache:
            basis = self.solver(self.fiber, wavelength_from_omega(self.omega0 + offset), self.grid)
            self._cache[offset] = basis.betas[match_modes(self.reference, basis)]
        return self._cache[offset]


def _difference(sample: _BetaSampler, h: float, order: int) -> np.ndarray:
    if order == 1:
        return (sample(h) - sample(-h)) / (2 * h)
    return (sample(h) + sample(-h) - 2 * sample(0.0)) / h ** 2


def beta_derivative_table(fiber: FiberSpec, wavelength: float, grid: Grid, order: int,
                          solver: Solver = solve_modes, reference: Optional[ModeBasis] = None,
                          initial_step: float = INITIAL_OMEGA_STEP) -> np.ndarray:
    """d^order beta / d omega^order for every mode of the basis at `wavelength`"""
    if order not in (1, 2):
        raise ConfigurationError(f"derivative order must be 1 or 2, got {order}", "order")
    if not initial_step > 0:
        raise ConfigurationError(f"initial step must be > 0, got {initial_step}", "initial_step")
    sample = _BetaSampler(fiber, wavelength, grid, solver, reference)

    def richardson(h):
        return (4 * _difference(sample, h / 2, order) - _difference(sample, h, order)) / 3

    h = initial_step
    previous = richardson(h)
    for _ in range(MAX_HALVINGS):
        h /= 2
        current = richardson(h)
        scale = np.max(np.abs(current))
        if np.all(np.abs(current - previous) <= REL_TOLERANCE * np.abs(current) + 1e-3 * REL_TOLERANCE * scale):
            logger.debug("order-%d beta derivatives converged at step %.3e rad/s", order, h)
            return current
        previous = current
    logger.warning("order-%d beta derivatives not stable to 1%% after %d halvings (step %.3e rad/s)",
                   order, MAX_HALVINGS, h)
    return current


def beta_derivatives(fiber: FiberSpec, mode_index: int, wavelength: float, order: int, grid: Grid,
                     solver: Solver = solve_modes) -> float:
    reference = solver(fiber, wavelength, grid)
    if not 0 <= mode_index < len(reference):
        raise ConfigurationError(f"mode index {mode_index} outside basis of {len(reference)} modes", "mode_index")
    return float(beta_derivative_table(fiber, wavelength, grid, order, solver, reference)[mode_index])


def matched_betas(reference: ModeBasis, omegas: Sequence[float], solver: Solver = solve_modes) -> np.ndarray:
    """beta of each reference mode at each angular frequency, shape (len(omegas), M)"""
    out = np.empty((len(omegas), len(reference)))
    for i, omega in enumerate(omegas):
        basis = solver(reference.fiber, wavelength_from_omega(omega), reference.grid)
        out[i] = basis.betas[match_modes(reference, basis)]
    return out
