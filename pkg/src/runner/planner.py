"""
Config validation and execution planning.

Every domain object an experiment needs is built here, so module
preconditions fail before any computation starts. Errors are reported with
the config key that carries the offending value.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, TypeVar

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from ..core.config import CM, MM, NM, UM, ScenarioConfig, config_hash
from ..core.errors import ConfigurationError
from ..core.types import Experiment, IndexProfile, MaterialKind, Medium
from ..elements.grating import GratingSpec
from ..elements.material import MaterialModel
from ..elements.scan import DiffuserScenario, GratingScenario
from ..fiber.cache import ModeCache
from ..fiber.modes import FiberSpec
from ..optics.field import Grid, RegionOfInterest
from ..optics.spectral import pair_wavelengths
from ..shaping.slm import ShapingSystem
from ..twophoton.scan import DetuningScan, FiberScenario, scan_wavelengths
from ..twophoton.speckle import DETECTOR_WAIST
from ..twophoton.state import SpdcSpec

logger = logging.getLogger(__name__)

T = TypeVar("T")

ROI_FRACTION = 0.25

# domain parameter -> config key
CONFIG_PATHS = {
    "grid.pitch": "grid.pitch_um",
    "fiber.core_radius": "fiber.core_radius_um",
    "fiber.length": "fiber.length_cm",
    "spdc.pump_wavelength": "spdc.pump_wavelength_nm",
    "spdc.crystal_length": "spdc.crystal_length_mm",
    "spdc.pump_waist": "spdc.pump_waist_um",
    "spdc.pump_bandwidth": "spdc.pump_bandwidth_nm",
    "scan.center_wavelength": "scan.center_wavelength_nm",
    "scan.detunings": "scan.detunings_nm",
    "scan.seed": "run.seed",
    "scenario.method": "scan.method",
    "study.dz": "study.dz_um",
    "material": "diffuser.material",
    "material.n0": "diffuser.index",
    "material.cauchy_a": "diffuser.cauchy_a",
    "screen.macro_pixel": "diffuser.macro_pixel_samples",
    "diffuser.thickness_max": "diffuser.thickness_max_waves",
    "diffuser.focal_length": "diffuser.focal_length_mm",
    "grating.period": "grating.period_um",
    "shaping.focal_length": "shaping.focal_length_mm",
}

FIBER_EXPERIMENTS = frozenset(Experiment) - {Experiment.GRATING_ORDERS}
SCREEN_EXPERIMENTS = frozenset({Experiment.CORRELATION_SCAN, Experiment.INCOHERENT_SUM})


def _checked(build: Callable[[], T]) -> T:
    """Run a domain constructor, re-keying its error to the config file"""
    try:
        return build()
    except ConfigurationError as e:
        path = CONFIG_PATHS.get(e.path, e.path)
        raise ConfigurationError(e.detail, path) from e


def build_grid(config: ScenarioConfig) -> Grid:
    return _checked(lambda: Grid(config.grid.size, config.grid.pitch_um * UM))


def build_fiber(config: ScenarioConfig) -> FiberSpec:
    section = config.fiber
    profile = IndexProfile.GRADED if config.medium is Medium.FIBER_GRADED else IndexProfile.STEP
    return _checked(lambda: FiberSpec(section.core_radius_um * UM, section.numerical_aperture,
                                      section.length_cm * CM, profile, section.cladding_index))


def pump_bandwidth(config: ScenarioConfig) -> float:
    """Pump linewidth in nm to the angular-frequency offset epsilon_p"""
    lam_p = config.spdc.pump_wavelength_nm * NM
    return 2 * np.pi * SPEED_OF_LIGHT * config.spdc.pump_bandwidth_nm * NM / lam_p ** 2


def build_spdc(config: ScenarioConfig, crystal_length_mm: Optional[float] = None) -> SpdcSpec:
    section = config.spdc
    length = section.crystal_length_mm if crystal_length_mm is None else crystal_length_mm
    return _checked(lambda: SpdcSpec(section.pump_wavelength_nm * NM, length * MM, section.pump_waist_um * UM,
                                     section.magnification, pump_bandwidth(config), section.crystal_index))


def build_scan(config: ScenarioConfig, detunings_nm: Optional[Tuple[float, ...]] = None,
               realizations: Optional[int] = None) -> DetuningScan:
    section = config.scan
    detunings = section.detunings_nm if detunings_nm is None else detunings_nm
    count = section.realizations if realizations is None else realizations
    return _checked(lambda: DetuningScan(section.center_wavelength_nm * NM, tuple(d * NM for d in detunings),
                                         count, config.run.seed))


def build_fiber_scenario(config: ScenarioConfig, solver) -> FiberScenario:
    grid = build_grid(config)
    fiber = build_fiber(config)
    if grid.pitch > DETECTOR_WAIST / 2:
        raise ConfigurationError(
            f"detector waist {DETECTOR_WAIST * 1e6:.2f} um needs pitch <= {DETECTOR_WAIST / 2 * 1e6:.2f} um",
            "grid.pitch_um")
    if grid.extent / 2 <= fiber.core_radius:
        raise ConfigurationError(
            f"grid half-extent {grid.extent / 2 * 1e6:.1f} um does not cover the core radius "
            f"{fiber.core_radius * 1e6:.1f} um", "grid.size")
    spdc = build_spdc(config)
    roi = _checked(lambda: RegionOfInterest.centered_fraction(grid.shape, grid.pitch, ROI_FRACTION))
    return _checked(lambda: FiberScenario(fiber, grid, None if spdc.is_thin else spdc, 0.0, config.scan.method,
                                          solver, config.run.threads, roi, pump_offset=spdc.pump_bandwidth))


def build_material(config: ScenarioConfig) -> MaterialModel:
    section = config.diffuser
    if section.material is MaterialKind.CAUCHY:
        return _checked(lambda: MaterialModel.cauchy(section.cauchy_a, section.cauchy_b_um2, section.cauchy_c_um4))
    return _checked(lambda: MaterialModel.constant(section.index))


def build_diffuser_scenario(config: ScenarioConfig) -> DiffuserScenario:
    grid = build_grid(config)
    section = config.diffuser
    material = build_material(config)
    lam0 = config.scan.center_wavelength_nm * NM
    if section.macro_pixel_samples < 1:
        raise ConfigurationError(f"need >= 1 sample per macro-pixel, got {section.macro_pixel_samples}",
                                 "diffuser.macro_pixel_samples")
    if not section.illumination_waist_samples > 0:
        raise ConfigurationError(f"illumination waist must be > 0, got {section.illumination_waist_samples}",
                                 "diffuser.illumination_waist_samples")
    return _checked(lambda: DiffuserScenario(
        grid, section.macro_pixel_samples * grid.pitch, section.thickness_max_waves * lam0, material,
        section.focal_length_mm * MM, section.illumination_waist_samples * grid.pitch, config.medium,
        config.run.threads))


def grating_detunings(config: ScenarioConfig) -> List[float]:
    """Symmetric band -band..+band in band_step increments, nm"""
    section = config.grating
    if not section.band_step_nm > 0 or not section.band_nm >= 0:
        raise ConfigurationError("need band_nm >= 0 and band_step_nm > 0", "grating.band_step_nm")
    steps = int(math.floor(section.band_nm / section.band_step_nm + 1e-9))
    return [k * section.band_step_nm for k in range(-steps, steps + 1)]


def build_grating_scenario(config: ScenarioConfig) -> GratingScenario:
    grid = build_grid(config)
    section = config.grating
    lam0 = config.scan.center_wavelength_nm * NM
    spec = _checked(lambda: GratingSpec(section.period_um * UM, lam0, section.index))
    if not section.beam_waist_periods > 0:
        raise ConfigurationError(f"beam waist must be > 0, got {section.beam_waist_periods}",
                                 "grating.beam_waist_periods")
    if not section.focal_length_mm > 0:
        raise ConfigurationError(f"focal length must be > 0, got {section.focal_length_mm}", "grating.focal_length_mm")
    if grid.pitch > spec.period / 4:
        raise ConfigurationError(f"need >= 4 samples per grating period, pitch is {grid.pitch * 1e6:.3g} um",
                                 "grid.pitch_um")
    for d in grating_detunings(config):
        if not abs(d * NM) < lam0:
            raise ConfigurationError(f"detuning {d} nm exceeds the carrier", "grating.band_nm")
    return GratingScenario(spec, grid, section.beam_waist_periods * spec.period, section.focal_length_mm * MM,
                           config.run.threads)


def build_shaping_system(config: ScenarioConfig, solver) -> ShapingSystem:
    section = config.shaping
    scenario = build_fiber_scenario(config, solver)
    return _checked(lambda: ShapingSystem(scenario.fiber, scenario.grid, config.scan.center_wavelength_nm * NM,
                                          section.focal_length_mm * MM, None, section.slm_pixels,
                                          section.slm_samples, solver, config.run.threads))


def shaping_detunings(config: ScenarioConfig) -> List[float]:
    detunings = [d * NM for d in config.shaping.detunings_nm]
    if not detunings or detunings[0] != 0.0 or any(b <= a for a, b in zip(detunings, detunings[1:])):
        raise ConfigurationError("detunings must start at 0 and ascend", "shaping.detunings_nm")
    return detunings


def mixing_pixels(config: ScenarioConfig, samples: int) -> int:
    """Macro-pixels per side covering the core for a given macro-pixel size"""
    core = 2 * config.fiber.core_radius_um * UM
    return int(math.ceil(core / (samples * config.grid.pitch_um * UM) - 1e-9))


@dataclass
class ExecutionPlan:
    config: ScenarioConfig
    config_hash: str
    wavelengths: List[float] = field(default_factory=list)     # distinct mode-basis solves
    cache_hits: List[float] = field(default_factory=list)
    cache_misses: List[float] = field(default_factory=list)
    tasks: int = 0
    notes: List[str] = field(default_factory=list)

    @property
    def basis_solves(self) -> int:
        return len(self.cache_misses)

    def summary_lines(self) -> List[str]:
        scenario = self.config.scenario
        lines = [
            f"Scenario: {scenario.name} ({scenario.medium.value}, {scenario.experiment.value})",
            f"Config hash: {self.config_hash[:16]}",
            f"Mode bases: {len(self.wavelengths)} wavelengths, {len(self.cache_hits)} cached, "
            f"{self.basis_solves} to solve",
            f"Tasks: {self.tasks}",
        ]
        lines.extend(self.notes)
        return lines


def _fiber_wavelengths(config: ScenarioConfig) -> Tuple[List[float], int]:
    experiment = config.experiment
    if experiment is Experiment.MODE_MIXING:
        return [config.scan.center_wavelength_nm * NM], \
            len(config.study.mixing_pixel_samples) * config.study.mixing_seeds
    if experiment is Experiment.WFS:
        detunings = shaping_detunings(config)
        lam0 = config.scan.center_wavelength_nm * NM
        wavelengths = {w for d in detunings for w in pair_wavelengths(lam0, d)}
        return sorted(wavelengths), len(config.shaping.scenarios) * len(detunings)
    realizations = 1 if experiment is Experiment.INCOHERENT_SUM else config.scan.realizations
    scan = build_scan(config, realizations=realizations)
    offset = pump_bandwidth(config)
    wavelengths = {w for pair in scan_wavelengths(scan.center_wavelength, scan.detunings, offset) for w in pair}
    runs = 1
    if experiment is Experiment.DEFOCUS_STUDY:
        runs = len(config.study.dz_um)
    elif experiment is Experiment.PHASE_MATCHING_STUDY:
        runs = 1 + len(config.spdc.crystal_lengths_mm)
    return sorted(wavelengths), runs * scan.realizations * len(scan.detunings)


def _validate_fiber_experiment(config: ScenarioConfig, solver):
    experiment = config.experiment
    scenario = build_fiber_scenario(config, solver)
    build_scan(config)
    if experiment is Experiment.DEFOCUS_STUDY:
        if not config.study.dz_um:
            raise ConfigurationError("defocus study needs at least one dz", "study.dz_um")
        if any(not dz >= 0 for dz in config.study.dz_um):
            raise ConfigurationError("defocus must be >= 0", "study.dz_um")
    if experiment is Experiment.PHASE_MATCHING_STUDY:
        if not config.spdc.crystal_lengths_mm:
            raise ConfigurationError("phase-matching study needs crystal lengths", "spdc.crystal_lengths_mm")
        lam_p = config.spdc.pump_wavelength_nm
        if abs(2 * lam_p - config.scan.center_wavelength_nm) > 1e-3 * config.scan.center_wavelength_nm:
            raise ConfigurationError(
                f"degenerate pairs of a {lam_p:g} nm pump are at {2 * lam_p:g} nm, scan centre is "
                f"{config.scan.center_wavelength_nm:g} nm", "spdc.pump_wavelength_nm")
        for length in config.spdc.crystal_lengths_mm:
            build_spdc(config, length)
    if experiment is Experiment.WFS:
        build_shaping_system(config, solver)
        shaping_detunings(config)
        if not config.shaping.scenarios:
            raise ConfigurationError("no shaping scenario selected", "shaping.scenarios")
    if experiment is Experiment.MODE_MIXING:
        if config.study.mixing_seeds < 1:
            raise ConfigurationError("need >= 1 mask seed", "study.mixing_seeds")
        for samples in config.study.mixing_pixel_samples:
            if samples < 1:
                raise ConfigurationError(f"macro-pixel samples must be >= 1, got {samples}",
                                         "study.mixing_pixel_samples")
            if mixing_pixels(config, samples) * samples > scenario.grid.size:
                raise ConfigurationError(f"{samples}-sample masks covering the core exceed the grid",
                                         "study.mixing_pixel_samples")


def validate_and_plan(config: ScenarioConfig, cache: Optional[ModeCache] = None) -> ExecutionPlan:
    """Check every precondition of the configured experiment and list the work it needs"""
    cache = cache if cache is not None else ModeCache(config.run.mode_cache or None)
    medium, experiment = config.medium, config.experiment
    if config.run.threads < 1:
        raise ConfigurationError(f"threads must be >= 1, got {config.run.threads}", "run.threads")
    plan = ExecutionPlan(config, config_hash(config))

    if medium.is_fiber:
        if experiment not in FIBER_EXPERIMENTS:
            raise ConfigurationError(f"{experiment.value} is not available for {medium.value}", "scenario.experiment")
        _validate_fiber_experiment(config, cache)
        fiber, grid = build_fiber(config), build_grid(config)
        plan.wavelengths, plan.tasks = _fiber_wavelengths(config)
        for w in plan.wavelengths:
            (plan.cache_hits if cache.contains(fiber, w, grid) else plan.cache_misses).append(w)
        if config.study.residuals and experiment is Experiment.CORRELATION_SCAN:
            plan.notes.append("Phase residuals: derivative samples solved on demand")
    elif medium.is_screen:
        if experiment not in SCREEN_EXPERIMENTS:
            raise ConfigurationError(f"{experiment.value} is not available for {medium.value}", "scenario.experiment")
        scenario = build_diffuser_scenario(config)
        scan = build_scan(config, realizations=1 if experiment is Experiment.INCOHERENT_SUM else None)
        lam0 = scan.center_wavelength
        _checked(lambda: scenario.material.check_band(
            [w for d in scan.detunings for w in pair_wavelengths(lam0, d)]))
        plan.tasks = scan.realizations * len(scan.detunings)
    else:
        if experiment is not Experiment.GRATING_ORDERS:
            raise ConfigurationError(f"{experiment.value} is not available for {medium.value}", "scenario.experiment")
        build_grating_scenario(config)
        plan.tasks = len(grating_detunings(config))

    logger.debug("plan: %d wavelengths, %d misses, %d tasks", len(plan.wavelengths), plan.basis_solves, plan.tasks)
    return plan
