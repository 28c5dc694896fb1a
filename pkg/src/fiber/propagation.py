"""Projection onto, and synthesis from, a fiber mode basis"""

import logging

import numpy as np

from ..core.errors import ConfigurationError, GridMismatchError
from ..optics.field import ComplexField
from .modes import ModeBasis

logger = logging.getLogger(__name__)


def check_field_on_basis(field: ComplexField, basis: ModeBasis):
    if field.shape != basis.grid.shape or not np.isclose(field.pitch, basis.grid.pitch, rtol=1e-12, atol=0.0):
        raise GridMismatchError(
            f"field {field.shape}@{field.pitch:.4e} m is not on the basis grid "
            f"{basis.grid.shape}@{basis.grid.pitch:.4e} m")
    if not np.isclose(field.wavelength, basis.wavelength, rtol=1e-12, atol=0.0):
        raise GridMismatchError(
            f"field wavelength {field.wavelength:.6e} m differs from basis wavelength {basis.wavelength:.6e} m")


def modal_decompose(field: ComplexField, basis: ModeBasis) -> np.ndarray:
    """c_n = sum_x f_n(x) E(x) pitch^2"""
    check_field_on_basis(field, basis)
    return basis.matrix @ field.values.reshape(-1) * basis.grid.pitch ** 2


def modal_compose(coefficients, basis: ModeBasis) -> ComplexField:
    coefficients = np.asarray(coefficients, dtype=np.complex128)
    if coefficients.shape != (len(basis),):
        raise ConfigurationError(
            f"expected {len(basis)} coefficients, got shape {coefficients.shape}", "coefficients")
    values = (coefficients @ basis.matrix).reshape(basis.grid.shape)
    return ComplexField(values, basis.grid.pitch, basis.wavelength)


def propagate_in_fiber(coefficients, basis: ModeBasis, length: float) -> np.ndarray:
    """Multiply each modal amplitude by exp(i beta_n L)"""
    if not length >= 0:
        raise ConfigurationError(f"length must be >= 0, got {length}", "fiber.length")
    coefficients = np.asarray(coefficients, dtype=np.complex128)
    if coefficients.shape[-1] != len(basis):
        raise ConfigurationError(
            f"expected {len(basis)} coefficients, got shape {coefficients.shape}", "coefficients")
    if length == 0:
        return coefficients.copy()
    return coefficients * np.exp(1j * basis.betas * length)


def transmit(field: ComplexField, basis: ModeBasis, length: float) -> ComplexField:
    """Input facet field -> output facet field"""
    return modal_compose(propagate_in_fiber(modal_decompose(field, basis), basis, length), basis)
