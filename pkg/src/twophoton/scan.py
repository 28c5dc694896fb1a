"""
Detuning scans: speckle correlation against the degenerate pattern.

Every realization draws one detector position inside the core (also used as
the classical input spot). The degenerate (d_lambda = 0) maps of each
realization are the references its correlation values are normalised to.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import ConfigurationError
from ..core.rng import realization_generators
from ..core.types import Channel
from ..core.workqueue import WorkQueue
from ..fiber.dispersion import Solver
from ..fiber.modes import FiberSpec, ModeBasis, solve_modes
from ..fiber.propagation import modal_compose, modal_decompose, propagate_in_fiber
from ..optics.field import Grid, IntensityMap, RegionOfInterest
from ..optics.metrics import incoherent_sum, pearson_correlation
from ..optics.spectral import detuning_to_omega, pair_wavelengths
from .speckle import (DETECTOR_WAIST, advanced_wave_amplitude, detector_mode_at, detector_overlaps,
                      random_detector_position)
from .state import (SpdcSpec, TwoPhotonModeState, cnm_finite_phase_matching, cnm_thin_crystal, defocus_cnm)

logger = logging.getLogger(__name__)

DEFAULT_REALIZATIONS = 23


@dataclass(frozen=True)
class DetuningScan:
    center_wavelength: float
    detunings: Tuple[float, ...]
    realizations: int = DEFAULT_REALIZATIONS
    seed: int = 0

    def __post_init__(self):
        detunings = tuple(float(d) for d in self.detunings)
        if not detunings or detunings[0] != 0.0:
            raise ConfigurationError("detunings must start with 0", "scan.detunings")
        if any(b <= a for a, b in zip(detunings, detunings[1:])):
            raise ConfigurationError("detunings must be strictly ascending", "scan.detunings")
        if self.realizations < 1:
            raise ConfigurationError(f"realizations must be >= 1, got {self.realizations}", "scan.realizations")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {self.seed}", "scan.seed")
        if not self.center_wavelength > 0:
            raise ConfigurationError(f"wavelength must be > 0, got {self.center_wavelength}", "scan.center_wavelength")
        object.__setattr__(self, "detunings", detunings)


@dataclass(frozen=True)
class CorrelationCurve:
    detunings: np.ndarray
    pcc_mean: np.ndarray
    pcc_stderr: np.ndarray
    channel: Channel
    label: str = ""

    def first_below(self, level: float) -> float:
        """Linearly interpolated detuning where the mean first drops below `level` (inf if never)"""
        below = np.nonzero(self.pcc_mean < level)[0]
        if below.size == 0:
            return float("inf")
        i = int(below[0])
        if i == 0:
            return float(self.detunings[0])
        x0, x1 = self.detunings[i - 1], self.detunings[i]
        y0, y1 = self.pcc_mean[i - 1], self.pcc_mean[i]
        return float(x0 + (y0 - level) * (x1 - x0) / (y0 - y1))

    def at(self, detuning: float) -> float:
        return float(np.interp(detuning, self.detunings, self.pcc_mean))


@dataclass
class FiberScenario:
    """Everything a fiber scan needs besides the detuning list"""
    fiber: FiberSpec
    grid: Grid
    spdc: Optional[SpdcSpec] = None         # None: thin crystal, plane-wave pump
    dz: float = 0.0
    method: str = "direct"                  # or "awp"
    solver: Solver = solve_modes
    threads: int = 1
    roi: Optional[RegionOfInterest] = None
    detector_waist: float = DETECTOR_WAIST
    pump_offset: Optional[float] = None     # epsilon_p, rad/s; None: from spdc

    def __post_init__(self):
        if self.pump_offset is None:
            self.pump_offset = 0.0 if self.spdc is None else self.spdc.pump_bandwidth
        if not self.pump_offset >= 0:
            raise ConfigurationError(f"pump bandwidth must be >= 0, got {self.pump_offset}", "spdc.pump_bandwidth")
        if self.spdc is not None and self.pump_offset != self.spdc.pump_bandwidth:
            raise ConfigurationError("pump offset disagrees with the source pump bandwidth", "spdc.pump_bandwidth")
        if self.method not in ("direct", "awp"):
            raise ConfigurationError(f"unknown method {self.method!r}", "scenario.method")
        if not self.dz >= 0:
            raise ConfigurationError(f"defocus must be >= 0, got {self.dz}", "study.dz")
        if self.dz > 0 and self.spdc is not None and not self.spdc.is_thin:
            raise ConfigurationError("defocus is modelled for the thin-crystal kernel only", "study.dz")


@dataclass
class ScanResult:
    curves: Dict[Channel, CorrelationCurve]
    sums: Dict[Channel, IntensityMap] = field(default_factory=dict)
    wavelengths: List[float] = field(default_factory=list)


def scan_wavelengths(center_wavelength: float, detunings: Sequence[float],
                     pump_offset: float = 0.0) -> List[Tuple[float, float]]:
    return [pair_wavelengths(center_wavelength, d, pump_offset) for d in detunings]


def solve_pair_bases(scenario: FiberScenario, pairs: Sequence[Tuple[float, float]]) -> Dict[float, ModeBasis]:
    """One basis per distinct wavelength, solved on the work queue"""
    unique = sorted({w for pair in pairs for w in pair})
    logger.info("solving %d mode bases", len(unique))
    bases = WorkQueue(scenario.threads, "basis solves").run(
        lambda w: scenario.solver(scenario.fiber, w, scenario.grid), unique)
    return dict(zip(unique, bases))


def build_state(scenario: FiberScenario, basis_plus: ModeBasis, basis_minus: ModeBasis,
                d_omega: float) -> TwoPhotonModeState:
    if scenario.dz > 0 and scenario.method == "direct":
        return defocus_cnm(basis_plus, basis_minus, scenario.dz, d_omega)
    if scenario.spdc is None or scenario.spdc.is_thin:
        return cnm_thin_crystal(basis_plus, basis_minus, d_omega)
    return cnm_finite_phase_matching(basis_plus, basis_minus, scenario.spdc, d_omega)


class _ScanEngine:
    """Per-detuning precomputation shared by all realizations"""

    def __init__(self, scan: DetuningScan, scenario: FiberScenario, channels: Sequence[Channel]):
        self.scan = scan
        self.scenario = scenario
        self.channels = tuple(channels)
        self.pairs = scan_wavelengths(scan.center_wavelength, scan.detunings, scenario.pump_offset)
        self.bases = solve_pair_bases(scenario, self.pairs)
        length = scenario.fiber.length
        self.states: List[Optional[TwoPhotonModeState]] = []
        self.kernels: List[Optional[np.ndarray]] = []
        for d_lambda, (wp, wm) in zip(scan.detunings, self.pairs):
            if Channel.SPDC not in self.channels:
                self.states.append(None)
                self.kernels.append(None)
                continue
            bp, bm = self.bases[wp], self.bases[wm]
            state = build_state(scenario, bp, bm, detuning_to_omega(d_lambda, scan.center_wavelength))
            self.states.append(state)
            self.kernels.append(state.coefficients * np.exp(1j * (bp.betas[:, None] + bm.betas[None, :]) * length))
        rngs = realization_generators(scan.seed, scan.realizations)
        self.positions = [random_detector_position(rng, scenario.fiber.core_radius) for rng in rngs]

    def maps(self, realization: int, index: int) -> Dict[Channel, IntensityMap]:
        scenario = self.scenario
        wp, _ = self.pairs[index]
        position = self.positions[realization]
        out = {}
        if Channel.CLASSICAL in self.channels:
            basis = self.bases[wp]
            source = detector_mode_at(position, scenario.grid, wp, scenario.detector_waist)
            coefficients = propagate_in_fiber(modal_decompose(source, basis), basis, scenario.fiber.length)
            out[Channel.CLASSICAL] = modal_compose(coefficients, basis).intensity("classical")
        if Channel.SPDC in self.channels:
            state = self.states[index]
            detector = detector_mode_at(position, scenario.grid, state.basis_plus.wavelength, scenario.detector_waist)
            if scenario.method == "awp":
                amplitude = advanced_wave_amplitude(state, detector, dz=scenario.dz)
            else:
                weights = detector_overlaps(detector, state.basis_plus) @ self.kernels[index]
                amplitude = modal_compose(weights, state.basis_minus)
            out[Channel.SPDC] = amplitude.intensity("spdc")
        return out


def _stderr(values: np.ndarray) -> np.ndarray:
    if values.shape[0] < 2:
        return np.zeros(values.shape[1:])
    return values.std(axis=0, ddof=1) / np.sqrt(values.shape[0])


def run_detuning_scan(scan: DetuningScan, scenario: FiberScenario,
                      channels: Sequence[Channel] = (Channel.CLASSICAL, Channel.SPDC),
                      label: str = "", sum_band: Optional[float] = None, sum_realization: int = 0) -> ScanResult:
    """Correlation curves per channel, plus incoherent sums over the scanned band.

    A sum is one detector position integrated over wavelength, so it is taken
    from the single realization `sum_realization`; curves average over all of
    them. With `sum_band` the sums only take detunings up to that value.
    """
    if not 0 <= sum_realization < scan.realizations:
        raise ConfigurationError(f"sum realization {sum_realization} outside 0..{scan.realizations - 1}",
                                 "scan.sum_realization")
    engine = _ScanEngine(scan, scenario, channels)
    queue_ = WorkQueue(scenario.threads, "realizations")
    references = queue_.run(lambda r: engine.maps(r, 0), list(range(scan.realizations)))

    def task(item):
        r, j = item
        maps = references[r] if j == 0 else engine.maps(r, j)
        values = {}
        for channel in engine.channels:
            values[channel] = 1.0 if j == 0 else pearson_correlation(references[r][channel], maps[channel],
                                                                      scenario.roi)
        return values, (maps if r == sum_realization else None)

    items = [(r, j) for r in range(scan.realizations) for j in range(len(scan.detunings))]
    results = WorkQueue(scenario.threads, "scan points").run(task, items)

    n_det = len(scan.detunings)
    detunings = np.array(scan.detunings)
    curves, sums = {}, {}
    for channel in engine.channels:
        table = np.array([values[channel] for values, _ in results]).reshape(scan.realizations, n_det)
        curves[channel] = CorrelationCurve(detunings, table.mean(axis=0), _stderr(table), channel, label)
        summed = results[sum_realization * n_det:(sum_realization + 1) * n_det]
        band = [maps[channel] for d, (_, maps) in zip(scan.detunings, summed) if sum_band is None or d <= sum_band]
        sums[channel] = incoherent_sum(band, label=f"{channel.value} sum")
    return ScanResult(curves, sums, sorted(engine.bases))


def apply_defocus_study(scan: DetuningScan, scenario: FiberScenario, dz: float) -> CorrelationCurve:
    """Coincidence correlation curve with the crystal image dz before the input facet"""
    if not dz >= 0:
        raise ConfigurationError(f"defocus must be >= 0, got {dz}", "study.dz")
    study = replace(scenario, dz=dz, method="awp", spdc=None)
    result = run_detuning_scan(scan, study, channels=(Channel.SPDC,), label=f"dz={dz * 1e6:.0f}um")
    return result.curves[Channel.SPDC]


def phase_matching_study(scan: DetuningScan, scenario: FiberScenario, spdc: SpdcSpec,
                         crystal_lengths: Sequence[float]) -> Dict[str, CorrelationCurve]:
    """Curves for each crystal length next to the thin-crystal and classical references"""
    reference = run_detuning_scan(scan, replace(scenario, spdc=None, dz=0.0), label="thin")
    curves = {
        "classical": reference.curves[Channel.CLASSICAL],
        "thin": reference.curves[Channel.SPDC],
    }
    for length in crystal_lengths:
        spec = replace(spdc, crystal_length=length)
        label = f"Lc={length * 1e3:g}mm"
        logger.info("phase-matching curve %s", label)
        result = run_detuning_scan(scan, replace(scenario, spdc=spec, dz=0.0), channels=(Channel.SPDC,), label=label)
        curves[label] = result.curves[Channel.SPDC]
    return curves
