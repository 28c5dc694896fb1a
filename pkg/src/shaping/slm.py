"""
Phase-only SLM focusing through a multimode fiber.

Three placements are modelled:

  classical        SLM shapes a laser at the fiber input
  spdc_slm_input   the crystal is imaged onto the SLM at the fiber input, so
                   both photons cross it (the mask phase counts twice)
  spdc_slm_output  the SLM sits on the output facet image of the scanned
                   photon only

Every scenario detects in the far field of the output facet (lens f). For the
photon-pair scenarios the fixed detector sits on the focusing target too; its
advanced wave is the fiber's target kernel at the fixed photon's wavelength.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import ConfigurationError, GridMismatchError
from ..core.rng import philox
from ..core.types import ShapingScenario, SlmPlane
from ..core.workqueue import WorkQueue
from ..fiber.dispersion import Solver
from ..fiber.modes import FiberSpec, ModeBasis, solve_modes
from ..fiber.propagation import modal_compose, modal_decompose, propagate_in_fiber
from ..optics.field import ComplexField, Grid, lens_far_field
from ..optics.spectral import pair_wavelengths
from ..twophoton.speckle import detector_mode_at, random_detector_position
from ..twophoton.state import TwoPhotonModeState

logger = logging.getLogger(__name__)

DEFAULT_SLM_PIXELS = 16
DEFAULT_SLM_SAMPLES = 13
DEFAULT_FOCAL_LENGTH = 0.1
TARGET_FRACTION = 0.25      # target at 0.25 NA f off axis
ZERO_TRANSMISSION = 1e-14   # relative to the largest macro-pixel coefficient

PLANES = {
    ShapingScenario.CLASSICAL: SlmPlane.FIBER_INPUT,
    ShapingScenario.SPDC_SLM_INPUT: SlmPlane.FIBER_INPUT,
    ShapingScenario.SPDC_SLM_OUTPUT: SlmPlane.FIBER_OUTPUT_ONE_PHOTON,
}


@dataclass(frozen=True)
class SlmMask:
    phases: np.ndarray = field(repr=False)      # (K, K) in [0, 2 pi)
    macro_pixel: float
    pitch: float
    plane: SlmPlane

    def __post_init__(self):
        phases = np.mod(np.array(self.phases, dtype=np.float64, copy=True), 2 * np.pi)
        # mod can round up to exactly 2 pi
        phases[phases >= 2 * np.pi] = 0.0
        if phases.ndim != 2 or phases.shape[0] != phases.shape[1]:
            raise ConfigurationError(f"mask must be square, got {phases.shape}", "slm.phases")
        ratio = self.macro_pixel / self.pitch
        if not self.pitch > 0 or round(ratio) < 1 or abs(ratio - round(ratio)) > 1e-6 * ratio:
            raise ConfigurationError(
                f"macro-pixel {self.macro_pixel:.4e} m is not an integer multiple of pitch {self.pitch:.4e} m",
                "slm.macro_pixel")
        phases.setflags(write=False)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "plane", SlmPlane(self.plane))

    @property
    def pixels(self) -> int:
        return self.phases.shape[0]

    @property
    def samples(self) -> int:
        return int(round(self.macro_pixel / self.pitch))

    def shifted(self, offset: float) -> "SlmMask":
        return SlmMask(self.phases + offset, self.macro_pixel, self.pitch, self.plane)

    def aperture(self, grid: Grid) -> Tuple[slice, slice]:
        span = self.pixels * self.samples
        if span > grid.size:
            raise GridMismatchError(f"SLM spans {span} samples, grid has {grid.size}")
        if not np.isclose(grid.pitch, self.pitch, rtol=1e-9, atol=0.0):
            raise GridMismatchError(f"SLM pitch {self.pitch:.4e} m differs from grid pitch {grid.pitch:.4e} m")
        start = (grid.size - span) // 2
        return slice(start, start + span), slice(start, start + span)

    def phase_map(self, grid: Grid) -> np.ndarray:
        """Phase on every grid sample; zero outside the SLM"""
        rows, cols = self.aperture(grid)
        out = np.zeros(grid.shape)
        out[rows, cols] = np.kron(self.phases, np.ones((self.samples, self.samples)))
        return out

    def aperture_map(self, grid: Grid) -> np.ndarray:
        rows, cols = self.aperture(grid)
        out = np.zeros(grid.shape)
        out[rows, cols] = 1.0
        return out


def flat_mask(pixels: int, samples: int, pitch: float, plane: SlmPlane) -> SlmMask:
    return SlmMask(np.zeros((pixels, pixels)), samples * pitch, pitch, plane)


def random_mask(pixels: int, samples: int, pitch: float, seed: int,
                plane: SlmPlane = SlmPlane.FIBER_OUTPUT_ONE_PHOTON) -> SlmMask:
    return SlmMask(philox(seed).uniform(0.0, 2 * np.pi, size=(pixels, pixels)), samples * pitch, pitch, plane)


def pixel_sums(values: np.ndarray, mask: SlmMask, grid: Grid) -> np.ndarray:
    """Sum of a grid map over each macro-pixel, shape (K, K)"""
    rows, cols = mask.aperture(grid)
    K, s = mask.pixels, mask.samples
    return values[rows, cols].reshape(K, s, K, s).sum(axis=(1, 3))


@dataclass(frozen=True)
class FocusReport:
    scenario: ShapingScenario
    enhancement: float
    half_bandwidth: float
    curve: Tuple[Tuple[float, float], ...]

    @property
    def detunings(self) -> np.ndarray:
        return np.array([d for d, _ in self.curve])

    @property
    def enhancements(self) -> np.ndarray:
        return np.array([e for _, e in self.curve])


@dataclass
class ShapingSystem:
    """Fiber, grid, lens and target shared by every focusing scenario"""
    fiber: FiberSpec
    grid: Grid
    center_wavelength: float
    focal_length: float = DEFAULT_FOCAL_LENGTH
    target: Optional[Tuple[float, float]] = None
    slm_pixels: int = DEFAULT_SLM_PIXELS
    slm_samples: int = DEFAULT_SLM_SAMPLES
    solver: Solver = solve_modes
    threads: int = 1

    def __post_init__(self):
        if self.target is None:
            self.target = (TARGET_FRACTION * self.fiber.numerical_aperture * self.focal_length, 0.0)
        if not self.focal_length > 0:
            raise ConfigurationError(f"focal length must be > 0, got {self.focal_length}", "shaping.focal_length")
        if self.slm_pixels < 1 or self.slm_samples < 1:
            raise ConfigurationError("SLM needs >= 1 macro-pixel of >= 1 sample", "shaping.slm_pixels")
        if self.slm_pixels * self.slm_samples > self.grid.size:
            raise ConfigurationError(
                f"SLM spans {self.slm_pixels * self.slm_samples} samples, grid has {self.grid.size}",
                "shaping.slm_samples")
        self._bases: Dict[float, ModeBasis] = {}

    @property
    def detection_radius(self) -> float:
        return self.fiber.numerical_aperture * self.focal_length

    def basis(self, wavelength: float) -> ModeBasis:
        if wavelength not in self._bases:
            self._bases[wavelength] = self.solver(self.fiber, wavelength, self.grid)
        return self._bases[wavelength]

    def target_kernel(self, wavelength: float) -> np.ndarray:
        """w(x) with far field at the target = sum_x w(x) E(x)"""
        X, Y = self.grid.coordinates()
        k = 2 * np.pi / wavelength
        tx, ty = self.target
        scale = self.grid.pitch ** 2 / (1j * wavelength * self.focal_length)
        return np.exp(-1j * k * (tx * X + ty * Y) / self.focal_length) * scale

    def fiber_target_kernel(self, wavelength: float) -> np.ndarray:
        """h(x) with target far field of the fiber output = sum_x h(x) E_in(x) pitch^2"""
        basis = self.basis(wavelength)
        W = basis.matrix @ self.target_kernel(wavelength).reshape(-1)
        weights = W * np.exp(1j * basis.betas * self.fiber.length)
        return (weights @ basis.matrix).reshape(self.grid.shape)

    def transmit(self, values: np.ndarray, wavelength: float) -> np.ndarray:
        basis = self.basis(wavelength)
        field = ComplexField(values, self.grid.pitch, wavelength)
        coefficients = propagate_in_fiber(modal_decompose(field, basis), basis, self.fiber.length)
        return modal_compose(coefficients, basis).values

    def enhancement(self, output: np.ndarray, wavelength: float) -> float:
        """Target intensity over the mean far-field intensity inside |x'| <= NA f"""
        target = np.sum(self.target_kernel(wavelength) * output)
        far = lens_far_field(ComplexField(output, self.grid.pitch, wavelength), self.focal_length)
        X, Y = Grid(self.grid.size, far.pitch).coordinates()
        disk = np.hypot(X, Y) <= self.detection_radius
        background = float(np.mean(np.abs(far.values[disk]) ** 2))
        if background <= 0:
            return 0.0
        return float(np.abs(target) ** 2 / background)

    def pump_envelope(self, mask: SlmMask) -> np.ndarray:
        """Uniform over the SLM aperture, unit power"""
        aperture = mask.aperture_map(self.grid)
        return aperture / np.sqrt(aperture.sum() * self.grid.pitch ** 2)

    def template(self) -> SlmMask:
        return flat_mask(self.slm_pixels, self.slm_samples, self.grid.pitch, SlmPlane.FIBER_INPUT)


def _wavelengths(system: ShapingSystem, scenario: ShapingScenario, d_lambda: float) -> Tuple[float, float]:
    """(fixed-detector photon, scanned photon / classical) wavelengths"""
    plus, minus = pair_wavelengths(system.center_wavelength, d_lambda)
    if scenario is ShapingScenario.CLASSICAL:
        return plus, plus
    return plus, minus


def transmission_coefficients(scenario: ShapingScenario, system: ShapingSystem, mask: SlmMask,
                              d_lambda: float = 0.0) -> np.ndarray:
    """Per-macro-pixel contribution to the target amplitude with a flat mask"""
    grid = system.grid
    fixed, scanned = _wavelengths(system, scenario, d_lambda)
    envelope = system.pump_envelope(mask)
    if scenario is ShapingScenario.CLASSICAL:
        return pixel_sums(system.fiber_target_kernel(scanned) * envelope, mask, grid) * grid.pitch ** 2
    advanced = system.fiber_target_kernel(fixed)
    if scenario is ShapingScenario.SPDC_SLM_INPUT:
        return pixel_sums(system.fiber_target_kernel(scanned) * advanced * envelope, mask, grid) * grid.pitch ** 2
    output = system.transmit(advanced * envelope, scanned)
    return pixel_sums(system.target_kernel(scanned) * output, mask, grid)


def _output_field(scenario: ShapingScenario, system: ShapingSystem, mask: SlmMask,
                  d_lambda: float) -> Tuple[np.ndarray, float]:
    """Output-facet field of the scanned channel, after the SLM, and its wavelength"""
    fixed, scanned = _wavelengths(system, scenario, d_lambda)
    envelope = system.pump_envelope(mask)
    phase = np.exp(1j * mask.phase_map(system.grid))
    if scenario is ShapingScenario.CLASSICAL:
        return system.transmit(envelope * phase, scanned), scanned
    advanced = system.fiber_target_kernel(fixed)
    if scenario is ShapingScenario.SPDC_SLM_INPUT:
        return system.transmit(advanced * envelope * phase ** 2, scanned), scanned
    output = system.transmit(advanced * envelope, scanned)
    return output * phase * mask.aperture_map(system.grid), scanned


def compute_focus_mask(scenario: ShapingScenario, system: ShapingSystem,
                       target: Optional[Tuple[float, float]] = None) -> SlmMask:
    """Phase conjugation of the per-macro-pixel target contributions at d_lambda = 0"""
    scenario = ShapingScenario(scenario)
    if target is not None:
        system.target = tuple(target)
    template = system.template()
    t = transmission_coefficients(scenario, system, template)
    magnitude = np.abs(t)
    dead = magnitude <= ZERO_TRANSMISSION * magnitude.max() if magnitude.max() > 0 else np.ones(t.shape, bool)
    if dead.any():
        logger.warning("%d of %d macro-pixels have zero transmission; left at phase 0", int(dead.sum()), t.size)
    phases = -np.angle(t)
    if scenario is ShapingScenario.SPDC_SLM_INPUT:
        phases = phases / 2
    phases[dead] = 0.0
    return SlmMask(phases, template.macro_pixel, template.pitch, PLANES[scenario])


def slm_input_state(system: ShapingSystem, mask: SlmMask, d_lambda: float = 0.0) -> TwoPhotonModeState:
    """Pair state in the fiber input modes with both photons through the mask; unit Frobenius norm"""
    if mask.plane is not SlmPlane.FIBER_INPUT:
        raise ConfigurationError(f"mask plane {mask.plane.value} is not the fiber input", "slm.plane")
    plus, minus = pair_wavelengths(system.center_wavelength, d_lambda)
    pump = system.pump_envelope(mask) * np.exp(2j * mask.phase_map(system.grid))
    bp, bm = system.basis(plus), system.basis(minus)
    C = (bp.matrix * pump.reshape(-1)) @ bm.matrix.T
    norm = np.linalg.norm(C)
    return TwoPhotonModeState(C / norm if norm > 0 else C, d_lambda, bp, bm)


def focus_enhancement(scenario: ShapingScenario, system: ShapingSystem, mask: SlmMask, d_lambda: float = 0.0) -> float:
    output, wavelength = _output_field(ShapingScenario(scenario), system, mask, d_lambda)
    return system.enhancement(output, wavelength)


def _half_bandwidth(curve: Sequence[Tuple[float, float]]) -> float:
    reference = curve[0][1]
    level = 0.5 * reference
    for (d0, e0), (d1, e1) in zip(curve, curve[1:]):
        if e1 < level:
            return float(d0 + (e0 - level) * (d1 - d0) / (e0 - e1))
    return float("inf")


def scan_focus_vs_detuning(mask: SlmMask, scenario: ShapingScenario, detunings: Sequence[float],
                           system: ShapingSystem) -> FocusReport:
    """Enhancement with a fixed mask while the wavelength (or pair detuning) is scanned"""
    scenario = ShapingScenario(scenario)
    detunings = [float(d) for d in detunings]
    if not detunings or detunings[0] != 0.0 or any(b <= a for a, b in zip(detunings, detunings[1:])):
        raise ConfigurationError("detunings must start at 0 and ascend", "shaping.detunings")
    if mask.plane is not PLANES[scenario]:
        raise ConfigurationError(f"mask plane {mask.plane.value} does not fit scenario {scenario.value}", "slm.plane")
    needed = sorted({w for d in detunings for w in _wavelengths(system, scenario, d)})
    WorkQueue(system.threads, "shaping bases").run(system.basis, needed)
    values = WorkQueue(system.threads, f"{scenario.value} detunings").run(
        lambda d: focus_enhancement(scenario, system, mask, d), detunings)
    curve = tuple(zip(detunings, values))
    half = _half_bandwidth(curve)
    if np.isinf(half):
        logger.info("%s focus never halves within %.2f nm", scenario.value, detunings[-1] * 1e9)
    return FocusReport(scenario, values[0], half, curve)


@dataclass(frozen=True)
class ModeMixingReport:
    before: np.ndarray = field(repr=False)
    after: np.ndarray = field(repr=False)
    overlap: float


def slm_mode_mixing_diagnostic(fiber: FiberSpec, mask: SlmMask, seed: int, wavelength: float, grid: Grid,
                               solver: Solver = solve_modes, basis: Optional[ModeBasis] = None) -> ModeMixingReport:
    """Mode-power distribution of a propagated speckle field before and after the mask"""
    if basis is None:
        basis = solver(fiber, wavelength, grid)
    position = random_detector_position(philox(seed), fiber.core_radius)
    source = detector_mode_at(position, grid, wavelength)
    before = propagate_in_fiber(modal_decompose(source, basis), basis, fiber.length)
    speckle = modal_compose(before, basis)
    shaped = speckle.replace(speckle.values * np.exp(1j * mask.phase_map(grid)))
    after = modal_decompose(shaped, basis)
    p = np.abs(before) ** 2
    q = np.abs(after) ** 2
    p, q = p / p.sum(), q / q.sum()
    return ModeMixingReport(p, q, float(np.sum(np.sqrt(p * q))))
