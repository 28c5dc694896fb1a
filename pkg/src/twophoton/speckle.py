"""
Classical and coincidence speckle at the fiber output facet.

The coincidence amplitude has two equivalent implementations: the direct
double sum over the state matrix, and the advanced-wave chain that sends
the fixed detector's mode backwards through the fiber, reflects it at the
crystal and forwards it again at the partner wavelength.
"""

import logging
from typing import Optional

import numpy as np

from ..core.errors import ConfigurationError, GridMismatchError
from ..fiber.dispersion import Solver
from ..fiber.modes import FiberSpec, ModeBasis, solve_modes
from ..fiber.propagation import modal_compose, modal_decompose, propagate_in_fiber
from ..optics.field import ComplexField, Grid, IntensityMap, centered_fft2, centered_ifft2, gaussian_source
from .state import TwoPhotonModeState, round_trip_transfer

logger = logging.getLogger(__name__)

DETECTOR_WAIST = 0.6e-6
DETECTOR_MARGIN = 0.8       # detector centres are drawn within 80% of the core radius


def classical_fiber_speckle(input_field: ComplexField, fiber: FiberSpec, wavelength: float,
                            solver: Solver = solve_modes, basis: Optional[ModeBasis] = None) -> IntensityMap:
    """|compose(propagate(decompose(input)))|^2 at the output facet"""
    if basis is None:
        grid = Grid(input_field.shape[0], input_field.pitch)
        basis = solver(fiber, wavelength, grid)
    field = input_field if np.isclose(input_field.wavelength, wavelength, rtol=1e-12, atol=0.0) \
        else input_field.replace(input_field.values, wavelength=wavelength)
    coefficients = propagate_in_fiber(modal_decompose(field, basis), basis, fiber.length)
    return modal_compose(coefficients, basis).intensity(f"classical {wavelength * 1e9:.3f} nm")


def detector_overlaps(detector_mode: ComplexField, basis: ModeBasis) -> np.ndarray:
    """<g|f_n> = sum_x conj(g) f_n pitch^2"""
    if detector_mode.shape != basis.grid.shape or not np.isclose(detector_mode.pitch, basis.grid.pitch,
                                                                  rtol=1e-12, atol=0.0):
        raise GridMismatchError(
            f"detector mode {detector_mode.shape}@{detector_mode.pitch:.4e} m is not on the fiber grid")
    return basis.matrix @ np.conj(detector_mode.values).reshape(-1) * basis.grid.pitch ** 2


def _fiber_length(state: TwoPhotonModeState, fiber: Optional[FiberSpec]) -> float:
    return state.basis_plus.fiber.length if fiber is None else fiber.length


def coincidence_amplitude(state: TwoPhotonModeState, detector_mode: ComplexField,
                          fiber: Optional[FiberSpec] = None) -> ComplexField:
    """A(x) = sum_nm C_nm exp(i(beta_n^+ + beta_m^-)L) <g|f_n^+> f_m^-(x)"""
    length = _fiber_length(state, fiber)
    bp, bm = state.basis_plus, state.basis_minus
    phases = np.exp(1j * (bp.betas[:, None] + bm.betas[None, :]) * length)
    weights = np.einsum("n,nm->m", detector_overlaps(detector_mode, bp), state.coefficients * phases)
    return modal_compose(weights, bm)


def coincidence_fiber_speckle(state: TwoPhotonModeState, detector_mode: ComplexField,
                              fiber: Optional[FiberSpec] = None) -> IntensityMap:
    amplitude = coincidence_amplitude(state, detector_mode, fiber)
    return amplitude.intensity(f"coincidence d_omega={state.detuning:.3e}")


def advanced_wave_amplitude(state: TwoPhotonModeState, detector_mode: ComplexField,
                            fiber: Optional[FiberSpec] = None, dz: float = 0.0) -> ComplexField:
    """Coincidence amplitude by the double pass through the fiber.

    With dz > 0 the crystal image sits dz before the facet and the crystal acts
    as a plane mirror with a wavelength switch, so the state must be a thin one.
    """
    if not dz >= 0:
        raise ConfigurationError(f"defocus must be >= 0, got {dz}", "study.dz")
    length = _fiber_length(state, fiber)
    bp, bm = state.basis_plus, state.basis_minus
    conjugate = ComplexField(np.conj(detector_mode.values), detector_mode.pitch, bp.wavelength)
    backward = propagate_in_fiber(modal_decompose(conjugate, bp), bp, length)
    at_facet = modal_compose(backward, bp)
    if dz == 0 and not state.thin:
        reflected = modal_decompose(at_facet, bp) @ state.coefficients
    else:
        if not state.thin:
            raise ConfigurationError("the defocused advanced-wave chain needs a thin-crystal state", "state")
        values = at_facet.values
        if dz > 0:
            values = centered_ifft2(centered_fft2(values) * round_trip_transfer(bp.grid, bp.wavelength,
                                                                                bm.wavelength, dz))
        switched = ComplexField(values, at_facet.pitch, bm.wavelength)
        reflected = modal_decompose(switched, bm)
    forward = propagate_in_fiber(reflected, bm, length)
    return modal_compose(forward, bm)


def coincidence_fiber_speckle_awp(state: TwoPhotonModeState, detector_mode: ComplexField,
                                  fiber: Optional[FiberSpec] = None, dz: float = 0.0) -> IntensityMap:
    amplitude = advanced_wave_amplitude(state, detector_mode, fiber, dz)
    return amplitude.intensity(f"coincidence (awp) d_omega={state.detuning:.3e} dz={dz:.2e}")


def random_detector_position(rng: np.random.Generator, core_radius: float,
                             margin: float = DETECTOR_MARGIN) -> tuple:
    """Uniform over the disk of radius margin * core_radius"""
    radius = margin * core_radius * np.sqrt(rng.uniform())
    angle = rng.uniform(0.0, 2 * np.pi)
    return (float(radius * np.cos(angle)), float(radius * np.sin(angle)))


def detector_mode_at(position, grid: Grid, wavelength: float, waist: float = DETECTOR_WAIST) -> ComplexField:
    return gaussian_source(waist, position, grid, wavelength)
