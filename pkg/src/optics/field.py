"""
Sampled scalar fields and Fourier-optics propagation.

FFT convention: the forward transform carries exp(-i q.x). Arrays are
centred, the physical coordinate of sample j is origin + (j - N//2) * pitch,
and spatial frequencies follow the same centring.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import fft as sfft

from ..core.errors import ConfigurationError, GridMismatchError

logger = logging.getLogger(__name__)


def _frozen(array: np.ndarray, dtype) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Grid:
    """Square sampling grid centred on the optical axis"""
    size: int
    pitch: float

    def __post_init__(self):
        if self.size < 2:
            raise ConfigurationError(f"grid size must be >= 2, got {self.size}", "grid.size")
        if not self.pitch > 0:
            raise ConfigurationError(f"pitch must be > 0, got {self.pitch}", "grid.pitch")

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.size, self.size)

    @property
    def extent(self) -> float:
        return self.size * self.pitch

    def axis(self) -> np.ndarray:
        return (np.arange(self.size) - self.size // 2) * self.pitch

    def coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        """(X, Y) meshgrid in meters, rows index y"""
        x = self.axis()
        return np.meshgrid(x, x, indexing="xy")

    def polar(self) -> Tuple[np.ndarray, np.ndarray]:
        X, Y = self.coordinates()
        return np.hypot(X, Y), np.arctan2(Y, X)


@dataclass(frozen=True)
class ComplexField:
    """Complex scalar field sampled on a square-pitch grid"""
    values: np.ndarray
    pitch: float
    wavelength: float
    origin: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 2 or min(values.shape) < 2:
            raise ConfigurationError(f"field must be 2D with >= 2 samples per axis, got {values.shape}", "field.values")
        if not self.pitch > 0:
            raise ConfigurationError(f"pitch must be > 0, got {self.pitch}", "field.pitch")
        if not self.wavelength > 0:
            raise ConfigurationError(f"wavelength must be > 0, got {self.wavelength}", "field.wavelength")
        object.__setattr__(self, "values", _frozen(values, np.complex128))
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    @property
    def wavenumber(self) -> float:
        return 2 * np.pi / self.wavelength

    @property
    def power(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.pitch ** 2)

    def replace(self, values: np.ndarray, **changes) -> "ComplexField":
        kwargs = dict(pitch=self.pitch, wavelength=self.wavelength, origin=self.origin)
        kwargs.update(changes)
        return ComplexField(values, **kwargs)

    def intensity(self, label: str = "") -> "IntensityMap":
        return IntensityMap(np.abs(self.values) ** 2, self.pitch, label, self.origin)


@dataclass(frozen=True)
class IntensityMap:
    """Non-negative intensity image with physical pitch"""
    values: np.ndarray
    pitch: float
    label: str = ""
    origin: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ConfigurationError(f"intensity map must be 2D, got {values.shape}", "intensity.values")
        if np.any(values < 0):
            # round-off from |E|^2 never goes negative; anything else is a caller bug
            raise ConfigurationError("intensity values must be >= 0", "intensity.values")
        if not self.pitch > 0:
            raise ConfigurationError(f"pitch must be > 0, got {self.pitch}", "intensity.pitch")
        object.__setattr__(self, "values", _frozen(values, np.float64))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def congruent(self, other: "IntensityMap") -> bool:
        return self.shape == other.shape and np.isclose(self.pitch, other.pitch, rtol=1e-9, atol=0.0)


@dataclass(frozen=True)
class RegionOfInterest:
    center: Tuple[float, float]
    half_width: float

    def __post_init__(self):
        if not self.half_width > 0:
            raise ConfigurationError(f"ROI half-width must be > 0, got {self.half_width}", "roi.half_width")

    def mask(self, shape: Tuple[int, int], pitch: float, origin: Tuple[float, float] = (0.0, 0.0)) -> np.ndarray:
        rows, cols = shape
        x = origin[0] + (np.arange(cols) - cols // 2) * pitch
        y = origin[1] + (np.arange(rows) - rows // 2) * pitch
        cx, cy = self.center
        tol = 1e-9 * pitch
        if (cx - self.half_width < x[0] - 0.5 * pitch - tol or cx + self.half_width > x[-1] + 0.5 * pitch + tol
                or cy - self.half_width < y[0] - 0.5 * pitch - tol or cy + self.half_width > y[-1] + 0.5 * pitch + tol):
            raise ConfigurationError("ROI extends beyond the field extent", "roi")
        in_x = np.abs(x - cx) <= self.half_width + tol
        in_y = np.abs(y - cy) <= self.half_width + tol
        return np.outer(in_y, in_x)

    @classmethod
    def centered_fraction(cls, shape: Tuple[int, int], pitch: float, fraction: float = 0.25) -> "RegionOfInterest":
        """Centred square spanning `fraction` of the smaller linear extent"""
        extent = min(shape) * pitch
        return cls((0.0, 0.0), 0.5 * fraction * extent)


def spatial_frequencies(shape: Tuple[int, int], pitch: float) -> Tuple[np.ndarray, np.ndarray]:
    """Centred angular spatial frequencies (QX, QY) in rad/m"""
    rows, cols = shape
    qx = 2 * np.pi * (np.arange(cols) - cols // 2) / (cols * pitch)
    qy = 2 * np.pi * (np.arange(rows) - rows // 2) / (rows * pitch)
    return np.meshgrid(qx, qy, indexing="xy")


def centered_fft2(values: np.ndarray) -> np.ndarray:
    return sfft.fftshift(sfft.fft2(sfft.ifftshift(values)))


def centered_ifft2(values: np.ndarray) -> np.ndarray:
    return sfft.fftshift(sfft.ifft2(sfft.ifftshift(values)))


def gaussian_source(waist: float, center: Tuple[float, float], grid: Grid, wavelength: float) -> ComplexField:
    """Unit-power Gaussian exp(-|x - c|^2 / w^2)"""
    if not waist > 0:
        raise ConfigurationError(f"waist must be > 0, got {waist}", "source.waist")
    if grid.pitch > waist / 2 * (1 + 1e-12):
        raise ConfigurationError(
            f"waist {waist:.3e} m is under-resolved by pitch {grid.pitch:.3e} m; required pitch <= {waist / 2:.3e} m",
            "grid.pitch")
    X, Y = grid.coordinates()
    values = np.exp(-((X - center[0]) ** 2 + (Y - center[1]) ** 2) / waist ** 2)
    values = values / np.sqrt(np.sum(values ** 2) * grid.pitch ** 2)
    return ComplexField(values, grid.pitch, wavelength)


def plane_wave(grid: Grid, wavelength: float) -> ComplexField:
    """Uniform field normalised to unit power over the grid"""
    values = np.full(grid.shape, 1.0 / grid.extent, dtype=np.complex128)
    return ComplexField(values, grid.pitch, wavelength)


def free_space_transfer(shape: Tuple[int, int], pitch: float, wavelength: float, dz: float) -> np.ndarray:
    """exp(i dz sqrt(k^2 - q^2)) on the centred q grid, zero for evanescent q"""
    k = 2 * np.pi / wavelength
    QX, QY = spatial_frequencies(shape, pitch)
    kz2 = k ** 2 - QX ** 2 - QY ** 2
    propagating = kz2 > 0
    transfer = np.zeros(shape, dtype=np.complex128)
    transfer[propagating] = np.exp(1j * dz * np.sqrt(kz2[propagating]))
    return transfer


def angular_spectrum_propagate(field: ComplexField, dz: float) -> ComplexField:
    """Advance a field by dz with the exact free-space transfer function.

    Evanescent components (|q| >= k) are truncated to zero.
    """
    if not np.isfinite(dz):
        raise ConfigurationError(f"propagation distance must be finite, got {dz}", "propagation.dz")
    if dz == 0:
        return field
    transfer = free_space_transfer(field.shape, field.pitch, field.wavelength, dz)
    return field.replace(centered_ifft2(centered_fft2(field.values) * transfer))


def lens_far_field(field: ComplexField, focal_length: float) -> ComplexField:
    """Field in the back focal plane of a thin lens of focal length f.

    E'(x') = 1/(i lambda f) * integral E(x) exp(-i k x.x'/f) dx, sampled with
    pitch lambda f / (N pitch); power is conserved (Parseval).
    """
    if not focal_length > 0:
        raise ConfigurationError(f"focal length must be > 0, got {focal_length}", "lens.focal_length")
    rows, cols = field.shape
    if rows != cols:
        raise GridMismatchError(f"lens_far_field needs a square field, got {field.shape}")
    scale = field.wavelength * focal_length
    out_pitch = scale / (cols * field.pitch)
    values = centered_fft2(field.values) * field.pitch ** 2 / (1j * scale)
    return ComplexField(values, out_pitch, field.wavelength)


def far_field_at(field: ComplexField, focal_length: float, points: np.ndarray) -> np.ndarray:
    """Far-field amplitude at arbitrary focal-plane points (x', y'), direct DFT sum"""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    rows, cols = field.shape
    x = field.origin[0] + (np.arange(cols) - cols // 2) * field.pitch
    y = field.origin[1] + (np.arange(rows) - rows // 2) * field.pitch
    scale = field.wavelength * focal_length
    k_over_f = field.wavenumber / focal_length
    out = np.empty(len(points), dtype=np.complex128)
    for i, (xp, yp) in enumerate(points):
        ex = np.exp(-1j * k_over_f * xp * x)
        ey = np.exp(-1j * k_over_f * yp * y)
        out[i] = ey @ field.values @ ex
    return out * field.pitch ** 2 / (1j * scale)
