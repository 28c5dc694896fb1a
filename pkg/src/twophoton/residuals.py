"""Per-mode phase residuals of classical light and of photon pairs"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..core.errors import ConfigurationError
from ..fiber.dispersion import Solver, beta_derivative_table, matched_betas
from ..fiber.modes import FiberSpec, ModeBasis, solve_modes
from ..optics.field import Grid
from ..optics.spectral import omega_from_wavelength

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhaseResidualTable:
    """Residual phases (rad) accumulated over the fiber, one row per mode.

    Taylor terms use the first/second frequency derivatives of beta; the
    exact terms difference solved propagation constants.
    """
    labels: List[str]
    d_omega: float
    length: float
    pump_bandwidth: float
    classical: np.ndarray = field(repr=False)              # beta' d_omega L
    two_photon_plus: np.ndarray = field(repr=False)        # beta'' d_omega^2 L + beta' eps L
    two_photon_minus: np.ndarray = field(repr=False)       # beta'' d_omega^2 L - beta' eps L
    cross: np.ndarray = field(repr=False)                  # (beta'_n - beta'_m) d_omega L
    exact_classical: np.ndarray = field(repr=False)        # (beta(w0 + dw) - beta(w0)) L
    exact_two_photon_plus: np.ndarray = field(repr=False)  # (beta(w0 + dw) + beta(w0 - dw + eps) - 2 beta(w0)) L
    exact_two_photon_minus: np.ndarray = field(repr=False)  # same with -eps

    def rows(self):
        for i, label in enumerate(self.labels):
            yield (label, self.classical[i], self.two_photon_plus[i], self.two_photon_minus[i],
                   self.exact_classical[i], self.exact_two_photon_plus[i], self.exact_two_photon_minus[i])


def phase_residuals(fiber: FiberSpec, center_wavelength: float, d_omega: float, length: float,
                    pump_bandwidth: float, grid: Grid, solver: Solver = solve_modes,
                    reference: Optional[ModeBasis] = None,
                    first: Optional[np.ndarray] = None,
                    second: Optional[np.ndarray] = None) -> PhaseResidualTable:
    """Classical, two-photon and cross-mode residual phases for every mode.

    Precomputed derivative tables may be passed in to reuse them across
    detunings.
    """
    if not length >= 0:
        raise ConfigurationError(f"length must be >= 0, got {length}", "fiber.length")
    if not pump_bandwidth >= 0:
        raise ConfigurationError(f"pump bandwidth must be >= 0, got {pump_bandwidth}", "spdc.pump_bandwidth")
    if reference is None:
        reference = solver(fiber, center_wavelength, grid)
    if first is None:
        first = beta_derivative_table(fiber, center_wavelength, grid, 1, solver, reference)
    if second is None:
        second = beta_derivative_table(fiber, center_wavelength, grid, 2, solver, reference)

    classical = first * d_omega * length
    gvd = second * d_omega ** 2 * length
    pump = first * pump_bandwidth * length
    cross = classical[:, None] - classical[None, :]

    omega0 = omega_from_wavelength(center_wavelength)
    beta0 = reference.betas
    if d_omega == 0 and pump_bandwidth == 0:
        exact_classical = np.zeros(len(reference))
        exact_plus = exact_minus = np.zeros(len(reference))
    else:
        offsets = [d_omega, -d_omega + pump_bandwidth, -d_omega - pump_bandwidth]
        unique = sorted(set(offsets))
        sampled = dict(zip(unique, _betas_at(reference, omega0, unique, solver)))
        exact_classical = (sampled[d_omega] - beta0) * length
        exact_plus = (sampled[d_omega] + sampled[offsets[1]] - 2 * beta0) * length
        exact_minus = (sampled[d_omega] + sampled[offsets[2]] - 2 * beta0) * length

    return PhaseResidualTable(reference.labels, d_omega, length, pump_bandwidth, classical,
                              gvd + pump, gvd - pump, cross, exact_classical, exact_plus, exact_minus)


def _betas_at(reference: ModeBasis, omega0: float, offsets, solver: Solver) -> np.ndarray:
    out = np.empty((len(offsets), len(reference)))
    nonzero = [i for i, o in enumerate(offsets) if o != 0]
    for i, o in enumerate(offsets):
        if o == 0:
            out[i] = reference.betas
    if nonzero:
        out[nonzero] = matched_betas(reference, [omega0 + offsets[i] for i in nonzero], solver)
    return out


def second_difference(reference: ModeBasis, d_omega: float, solver: Solver = solve_modes) -> np.ndarray:
    """beta(w0 + dw) + beta(w0 - dw) - 2 beta(w0) per mode (rad/m)"""
    omega0 = omega_from_wavelength(reference.wavelength)
    plus, minus = matched_betas(reference, [omega0 + d_omega, omega0 - d_omega], solver)
    return plus + minus - 2 * reference.betas
