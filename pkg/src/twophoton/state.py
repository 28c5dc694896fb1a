"""
Biphoton states expressed in a pair of fiber mode bases.

C[n, m] couples mode n of the basis at omega0 + d_omega (the fixed-detector
photon) to mode m of the basis at omega0 - d_omega (the scanned photon).
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core.errors import ConfigurationError, GridMismatchError, UnderSamplingError
from ..fiber.modes import ModeBasis
from ..optics.field import centered_fft2, centered_ifft2, free_space_transfer, spatial_frequencies

logger = logging.getLogger(__name__)

DEFAULT_CRYSTAL_INDEX = 1.69        # BBO-like pump index near 405 nm
EDGE_ENERGY_LIMIT = 0.01
EDGE_FRACTION = 0.1                 # outer 10% of the q-window
MAX_PUMP_OFFSETS = 400


@dataclass(frozen=True)
class SpdcSpec:
    """Pump, crystal and imaging parameters of the pair source"""
    pump_wavelength: float
    crystal_length: float = 0.0             # 0 = thin crystal
    pump_waist: float = float("inf")        # crystal plane; inf = plane-wave pump
    magnification: float = 1.0              # crystal-to-fiber demagnification M
    pump_bandwidth: float = 0.0             # epsilon_p, rad/s
    crystal_index: float = DEFAULT_CRYSTAL_INDEX

    def __post_init__(self):
        if not self.pump_wavelength > 0:
            raise ConfigurationError(f"pump wavelength must be > 0, got {self.pump_wavelength}", "spdc.pump_wavelength")
        if not self.crystal_length >= 0:
            raise ConfigurationError(f"crystal length must be >= 0, got {self.crystal_length}", "spdc.crystal_length")
        if not self.pump_waist > 0:
            raise ConfigurationError(f"pump waist must be > 0, got {self.pump_waist}", "spdc.pump_waist")
        if not self.magnification > 0:
            raise ConfigurationError(f"magnification must be > 0, got {self.magnification}", "spdc.magnification")
        if not self.pump_bandwidth >= 0:
            raise ConfigurationError(f"pump bandwidth must be >= 0, got {self.pump_bandwidth}", "spdc.pump_bandwidth")
        if not self.crystal_index >= 1:
            raise ConfigurationError(f"crystal index must be >= 1, got {self.crystal_index}", "spdc.crystal_index")

    @property
    def central_wavelength(self) -> float:
        return 2 * self.pump_wavelength

    @property
    def pump_waist_kspace(self) -> float:
        """sigma of the pump angular spectrum exp(-|Q|^2 / 2 sigma^2), crystal plane"""
        return np.sqrt(2.0) / self.pump_waist

    @property
    def pump_wavenumber(self) -> float:
        return 2 * np.pi * self.crystal_index / self.pump_wavelength

    @property
    def is_thin(self) -> bool:
        return self.crystal_length == 0 and np.isinf(self.pump_waist)


@dataclass(frozen=True)
class TwoPhotonModeState:
    coefficients: np.ndarray = field(repr=False)
    detuning: float
    basis_plus: ModeBasis = field(repr=False)
    basis_minus: ModeBasis = field(repr=False)
    thin: bool = False      # kernel is the real-space identity (thin crystal, plane-wave pump)

    def __post_init__(self):
        C = np.array(self.coefficients, dtype=np.complex128, copy=True)
        expected = (len(self.basis_plus), len(self.basis_minus))
        if C.shape != expected:
            raise ConfigurationError(f"C has shape {C.shape}, bases need {expected}", "state.coefficients")
        C.setflags(write=False)
        object.__setattr__(self, "coefficients", C)

    @property
    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def with_phase(self, phase: float) -> "TwoPhotonModeState":
        return TwoPhotonModeState(self.coefficients * np.exp(1j * phase), self.detuning, self.basis_plus,
                                  self.basis_minus, self.thin)

    def diagonal_power_fraction(self) -> float:
        C = self.coefficients
        k = min(C.shape)
        total = float(np.sum(np.abs(C) ** 2))
        return float(np.sum(np.abs(np.diagonal(C)[:k]) ** 2) / total) if total > 0 else 0.0


def _check_common_grid(basis_plus: ModeBasis, basis_minus: ModeBasis):
    if basis_plus.grid != basis_minus.grid:
        raise GridMismatchError(
            f"bases are on different grids: {basis_plus.grid} vs {basis_minus.grid}")


def cnm_thin_crystal(basis_plus: ModeBasis, basis_minus: ModeBasis, detuning: float = 0.0) -> TwoPhotonModeState:
    """C[n, m] = sum_x f_n^+(x) f_m^-(x) pitch^2"""
    _check_common_grid(basis_plus, basis_minus)
    if basis_plus is basis_minus:
        C = np.eye(len(basis_plus))
    else:
        C = basis_plus.matrix @ basis_minus.matrix.T * basis_plus.grid.pitch ** 2
    return TwoPhotonModeState(C, detuning, basis_plus, basis_minus, thin=True)


def _check_mode_spectra(basis: ModeBasis):
    N = basis.grid.size
    edge = int(np.ceil(EDGE_FRACTION * N / 2))
    outer = np.ones(basis.grid.shape, dtype=bool)
    outer[edge:N - edge, edge:N - edge] = False
    worst = 0.0
    for profile in basis.profiles:
        spectrum = np.abs(centered_fft2(profile)) ** 2
        worst = max(worst, float(spectrum[outer].sum() / spectrum.sum()))
    if worst > EDGE_ENERGY_LIMIT:
        raise UnderSamplingError(
            f"{100 * worst:.1f}% of a mode spectrum lies in the outer q-window at pitch "
            f"{basis.grid.pitch:.3e} m; use a pitch <= {0.5 * basis.grid.pitch:.3e} m")


def cnm_finite_phase_matching(basis_plus: ModeBasis, basis_minus: ModeBasis, spdc: SpdcSpec,
                              detuning: float = 0.0) -> TwoPhotonModeState:
    """Mode-basis state of a crystal of finite length pumped by a Gaussian beam.

    In fiber-plane coordinates the pair amplitude is
    E(q_s + q_i) * sinc(L_c |q_s - q_i|^2 / (4 k_p M^2)), E Gaussian of width
    M sigma. For every pump offset Q on the q lattice the idler factor is
    filtered in Fourier space and projected on the signal modes. The result
    has unit Frobenius norm.
    """
    _check_common_grid(basis_plus, basis_minus)
    grid = basis_plus.grid
    _check_mode_spectra(basis_plus)
    _check_mode_spectra(basis_minus)

    QX, QY = spatial_frequencies(grid.shape, grid.pitch)
    dq = 2 * np.pi / grid.extent
    q_max = np.pi / grid.pitch
    M2 = spdc.magnification ** 2
    pump_width = spdc.magnification * spdc.pump_waist_kspace      # fiber plane

    if spdc.crystal_length > 0:
        first_zero = np.sqrt(np.pi * spdc.pump_wavenumber * M2 / spdc.crystal_length)
        if first_zero < 2 * dq:
            raise UnderSamplingError(
                f"phase-matching sinc (first zero {first_zero:.3e} rad/m) is under-resolved by dq={dq:.3e} rad/m; "
                f"use a window >= {2 * np.pi * 2 / first_zero:.3e} m")
    if 4 * pump_width > q_max:
        raise UnderSamplingError(
            f"pump angular spectrum (width {pump_width:.3e} rad/m) exceeds the q-window {q_max:.3e} rad/m; "
            f"use a pitch <= {np.pi / (4 * pump_width):.3e} m")

    # pump offsets on the lattice
    if 3 * pump_width < dq:
        offsets = [(0, 0, 1.0)]
    else:
        reach = int(np.ceil(4 * pump_width / dq))
        offsets = []
        for iy in range(-reach, reach + 1):
            for ix in range(-reach, reach + 1):
                Q2 = (ix * dq) ** 2 + (iy * dq) ** 2
                if Q2 <= (4 * pump_width) ** 2:
                    offsets.append((ix, iy, float(np.exp(-Q2 / (2 * pump_width ** 2)))))
        if len(offsets) > MAX_PUMP_OFFSETS:
            logger.warning("pump kernel spans %d lattice offsets; quadrature will be slow", len(offsets))
    logger.debug("finite phase matching: L_c=%.2e m, %d pump offsets, %d x %d modes",
                 spdc.crystal_length, len(offsets), len(basis_plus), len(basis_minus))

    F_plus = basis_plus.matrix
    C = np.zeros((len(basis_plus), len(basis_minus)), dtype=np.complex128)
    for m, profile in enumerate(basis_minus.profiles):
        spectrum = centered_fft2(profile)
        column = np.zeros(len(basis_plus), dtype=np.complex128)
        for ix, iy, weight in offsets:
            # idler spectrum evaluated at q + Q
            shifted = np.roll(spectrum, shift=(-iy, -ix), axis=(0, 1)) if (ix or iy) else spectrum
            QXo, QYo = ix * dq, iy * dq
            if spdc.crystal_length > 0:
                d2 = (2 * QX + QXo) ** 2 + (2 * QY + QYo) ** 2
                kernel = np.sinc(spdc.crystal_length * d2 / (4 * spdc.pump_wavenumber * M2) / np.pi)
                filtered = centered_ifft2(shifted * kernel)
            else:
                filtered = centered_ifft2(shifted)
            column += weight * (F_plus @ filtered.reshape(-1))
        C[:, m] = column * grid.pitch ** 2
    norm = np.linalg.norm(C)
    if norm == 0:
        raise UnderSamplingError("phase-matching quadrature produced a zero state; refine the grid")
    return TwoPhotonModeState(C / norm, detuning, basis_plus, basis_minus, thin=False)


def defocus_cnm(basis_plus: ModeBasis, basis_minus: ModeBasis, dz: float, detuning: float = 0.0) -> TwoPhotonModeState:
    """Effective thin-crystal state when the crystal image sits dz before the facet.

    C[n, m] = sum_x f_m^-(x) (P_dz^- P_dz^+ f_n^+)(x) pitch^2 with P the
    angular-spectrum propagators at the two wavelengths.
    """
    if not dz >= 0:
        raise ConfigurationError(f"defocus must be >= 0, got {dz}", "study.dz")
    if dz == 0:
        return cnm_thin_crystal(basis_plus, basis_minus, detuning)
    _check_common_grid(basis_plus, basis_minus)
    grid = basis_plus.grid
    transfer = round_trip_transfer(grid, basis_plus.wavelength, basis_minus.wavelength, dz)
    F_minus = basis_minus.matrix
    C = np.empty((len(basis_plus), len(basis_minus)), dtype=np.complex128)
    for n, profile in enumerate(basis_plus.profiles):
        moved = centered_ifft2(centered_fft2(profile) * transfer)
        C[n] = F_minus @ moved.reshape(-1) * grid.pitch ** 2
    return TwoPhotonModeState(C, detuning, basis_plus, basis_minus, thin=False)


def round_trip_transfer(grid, wavelength_plus: float, wavelength_minus: float, dz: float) -> np.ndarray:
    """dz at lambda+ towards the crystal, then dz at lambda- back to the facet"""
    return (free_space_transfer(grid.shape, grid.pitch, wavelength_plus, dz)
            * free_space_transfer(grid.shape, grid.pitch, wavelength_minus, dz))
