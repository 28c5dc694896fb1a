"""
Blazed transmission gratings: sawtooth thickness profile, analytical
diffraction-order weights, and order powers measured on a far-field map.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..core.errors import ConfigurationError
from ..core.types import Channel
from ..optics.field import Grid, IntensityMap
from .material import MaterialModel

logger = logging.getLogger(__name__)

DEFAULT_ORDERS = tuple(range(-2, 5))


@dataclass(frozen=True)
class GratingSpec:
    period: float
    design_wavelength: float
    index: float = 1.5
    blaze_order: int = 1

    def __post_init__(self):
        if not self.period > self.design_wavelength > 0:
            raise ConfigurationError(
                f"need period > design wavelength > 0, got d={self.period}, lambda0={self.design_wavelength}",
                "grating.period")
        if not self.index > 1:
            raise ConfigurationError(f"grating index must be > 1, got {self.index}", "grating.index")
        if self.blaze_order != 1:
            raise ConfigurationError("only first-order blazed gratings are modelled", "grating.blaze_order")

    @property
    def height(self) -> float:
        """Sawtooth height: optical thickness lambda0"""
        return self.design_wavelength / (self.index - 1)

    @property
    def material(self) -> MaterialModel:
        return MaterialModel.constant(self.index)


@dataclass(frozen=True)
class OrderWeight:
    order: int
    center: float       # far-field position x'_m, meters
    weight: float
    width: float        # Gaussian spot width lambda f / (pi w0)


def grating_thickness(spec: GratingSpec, grid: Grid) -> np.ndarray:
    """L(x) = h * (x mod d) / d, grooves along y"""
    x = grid.axis()
    profile = spec.height * np.mod(x, spec.period) / spec.period
    return np.broadcast_to(profile[None, :], grid.shape).copy()


def _sinc2(x: np.ndarray) -> np.ndarray:
    return np.sinc(np.asarray(x) / np.pi) ** 2


def grating_orders_analytical(spec: GratingSpec, delta_k: float, beam_waist: float, focal_length: float,
                              channel: Channel, orders: Sequence[int] = DEFAULT_ORDERS) -> List[OrderWeight]:
    """Order weights of a Gaussian beam through an infinite blazed grating.

    The classical field at k0 + dk sees a sawtooth phase of 2 pi (k/k0) per
    period, so order m carries sinc^2(pi (m - k/k0)). A photon pair sees the
    phase of k+ + k- = 2 k0 and lands entirely in order 2.
    """
    if not beam_waist > 0 or not focal_length > 0:
        raise ConfigurationError("beam waist and focal length must be > 0", "grating")
    k0 = 2 * np.pi / spec.design_wavelength
    k = k0 + delta_k
    if not k > 0:
        raise ConfigurationError(f"detuned wavenumber must be > 0, got {k}", "grating.delta_k")
    wavelength = 2 * np.pi / k
    width = wavelength * focal_length / (np.pi * beam_waist)
    if channel is Channel.SPDC:
        return [OrderWeight(2, 2 * wavelength * focal_length / spec.period, 1.0, width)]
    ratio = k / k0
    return [OrderWeight(m, m * wavelength * focal_length / spec.period, float(_sinc2(np.pi * (m - ratio))), width)
            for m in orders]


def numerical_order_weights(image: IntensityMap, spec: GratingSpec, wavelength: float, focal_length: float,
                            orders: Sequence[int] = DEFAULT_ORDERS) -> List[OrderWeight]:
    """Fraction of far-field power within half an order spacing of each order centre"""
    spacing = wavelength * focal_length / spec.period
    if spacing < 2 * image.pitch:
        raise ConfigurationError(
            f"orders are {spacing / image.pitch:.2f} pixels apart; refine the far-field sampling", "grating")
    rows, cols = image.shape
    x = image.origin[0] + (np.arange(cols) - cols // 2) * image.pitch
    column_power = image.values.sum(axis=0)
    total = column_power.sum()
    out = []
    for m in orders:
        center = m * spacing
        window = np.abs(x - center) < 0.5 * spacing
        out.append(OrderWeight(m, center, float(column_power[window].sum() / total), float("nan")))
    return out


def peak_position(image: IntensityMap) -> float:
    """x' of the brightest column, meters"""
    cols = image.shape[1]
    column_power = image.values.sum(axis=0)
    return image.origin[0] + (int(np.argmax(column_power)) - cols // 2) * image.pitch
