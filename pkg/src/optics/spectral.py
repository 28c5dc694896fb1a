"""Wavelength / angular-frequency bookkeeping for photon pairs"""

from typing import Tuple

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from ..core.errors import ConfigurationError


def omega_from_wavelength(wavelength: float) -> float:
    if not wavelength > 0:
        raise ConfigurationError(f"wavelength must be > 0, got {wavelength}", "wavelength")
    return 2 * np.pi * SPEED_OF_LIGHT / wavelength


def wavelength_from_omega(omega: float) -> float:
    if not omega > 0:
        raise ConfigurationError(f"angular frequency must be > 0, got {omega}", "omega")
    return 2 * np.pi * SPEED_OF_LIGHT / omega


def detuning_to_omega(delta_lambda: float, center_wavelength: float) -> float:
    """Delta omega = -2 pi c Delta lambda / lambda0^2, linearised at lambda0"""
    return -2 * np.pi * SPEED_OF_LIGHT * delta_lambda / center_wavelength ** 2


def pair_wavelengths(center_wavelength: float, delta_lambda: float, pump_offset: float = 0.0) -> Tuple[float, float]:
    """(lambda+, lambda-) of a pair at omega0 + d_omega and omega0 - d_omega + pump_offset"""
    omega0 = omega_from_wavelength(center_wavelength)
    d_omega = detuning_to_omega(delta_lambda, center_wavelength)
    return wavelength_from_omega(omega0 + d_omega), wavelength_from_omega(omega0 - d_omega + pump_offset)
