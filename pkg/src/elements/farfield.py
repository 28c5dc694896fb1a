"""Thin elements in the Fourier plane of a lens: classical and coincidence far fields"""

import logging
from typing import Optional, Tuple, Union

import numpy as np

from ..core.errors import ConfigurationError, GridMismatchError
from ..core.types import WavenumberMode
from ..optics.field import ComplexField, Grid, IntensityMap, lens_far_field
from ..optics.spectral import omega_from_wavelength, wavelength_from_omega
from .grating import GratingSpec, grating_thickness
from .material import MaterialModel, phase_factor
from .screens import PhaseScreen

logger = logging.getLogger(__name__)

Element = Union[PhaseScreen, GratingSpec]


def element_thickness(element: Element, grid: Grid) -> np.ndarray:
    if isinstance(element, PhaseScreen):
        return element.sampled(grid)
    if isinstance(element, GratingSpec):
        return grating_thickness(element, grid)
    raise ConfigurationError(f"unsupported element {type(element).__name__}", "element")


def element_material(element: Element) -> MaterialModel:
    return element.material


def element_phase(element: Element, grid: Grid, mode: WavenumberMode, wavelength: float,
                  pair: Optional[Tuple[float, float]] = None) -> np.ndarray:
    """Phase map of the element: single (n-1) k L, or pair [(n+ - 1) k+ + (n- - 1) k-] L"""
    thickness = element_thickness(element, grid)
    material = element_material(element)
    if mode is WavenumberMode.SINGLE:
        return phase_factor(material, wavelength) * thickness
    if pair is None:
        raise ConfigurationError("pair mode needs (lambda+, lambda-)", "element.pair")
    return (phase_factor(material, pair[0]) + phase_factor(material, pair[1])) * thickness


def apply_phase_element(field: ComplexField, element: Element, mode: WavenumberMode = WavenumberMode.SINGLE,
                        pair: Optional[Tuple[float, float]] = None) -> ComplexField:
    rows, cols = field.shape
    if rows != cols:
        raise GridMismatchError(f"elements are sampled on square grids, got {field.shape}")
    grid = Grid(rows, field.pitch)
    phase = element_phase(element, grid, WavenumberMode(mode), field.wavelength, pair)
    return field.replace(field.values * np.exp(1j * phase))


def classical_farfield(element: Element, illumination: ComplexField, wavelength: float,
                       focal_length: float) -> IntensityMap:
    """|lens far field of the illuminated element|^2 at `wavelength`"""
    source = illumination.replace(illumination.values, wavelength=wavelength)
    out = lens_far_field(apply_phase_element(source, element, WavenumberMode.SINGLE), focal_length)
    return out.intensity(f"classical {wavelength * 1e9:.2f} nm")


def two_photon_farfield(element: Element, envelope: ComplexField, d_omega: float, focal_length: float,
                        center_wavelength: Optional[float] = None) -> IntensityMap:
    """Coincidence map with one detector fixed at the far-field origin.

    The fixed detector's advanced wave reaches the element as a plane wave at
    lambda+, weighted by the pump envelope imaged there; it picks up the
    pair phase and is Fourier transformed at lambda-.
    """
    center = envelope.wavelength if center_wavelength is None else center_wavelength
    omega0 = omega_from_wavelength(center)
    if not abs(d_omega) < omega0:
        raise ConfigurationError(f"detuning {d_omega:.3e} rad/s exceeds the carrier", "d_omega")
    pair = (wavelength_from_omega(omega0 + d_omega), wavelength_from_omega(omega0 - d_omega))
    source = envelope.replace(envelope.values, wavelength=pair[1])
    reflected = apply_phase_element(source, element, WavenumberMode.PAIR, pair)
    out = lens_far_field(reflected, focal_length)
    return out.intensity(f"coincidence d_omega={d_omega:.3e}")
