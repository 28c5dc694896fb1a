"""
Experiment execution: dispatch a validated config to the owning modules and
write its artifacts. The manifest is always written last, also when the
experiment fails part way.
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .. import __version__
from ..core.config import MM, NM, UM, ConfigManager, ScenarioConfig
from ..core.errors import ExperimentError, QtpError
from ..core.rng import realization_seeds
from ..core.types import Channel, Experiment, ShapingScenario
from ..elements.scan import diffuser_detuning_scan, grating_band_study
from ..fiber.cache import ModeCache
from ..io.formats import (sha256_file, write_curve_csv, write_focus_csv, write_manifest, write_orders_csv,
                          write_pgm, write_qtpf, write_screen, write_table_csv)
from ..optics.metrics import speckle_contrast
from ..optics.spectral import detuning_to_omega
from ..shaping.slm import (PLANES, compute_focus_mask, random_mask, scan_focus_vs_detuning, slm_input_state,
                           slm_mode_mixing_diagnostic)
from ..twophoton.residuals import phase_residuals
from ..twophoton.scan import ScanResult, apply_defocus_study, phase_matching_study, run_detuning_scan
from . import planner

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


@dataclass
class OutputRecord:
    path: str
    sha256: str
    size: int


@dataclass
class RunManifest:
    name: str
    experiment: str
    medium: str
    config_hash: str
    code_version: str
    seed: int
    outputs: List[OutputRecord] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    cache_hits: int = 0
    cache_misses: int = 0
    partial: bool = False
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "experiment": self.experiment,
            "medium": self.medium,
            "config_hash": self.config_hash,
            "code_version": self.code_version,
            "seed": self.seed,
            "outputs": [{"path": o.path, "sha256": o.sha256, "bytes": o.size} for o in self.outputs],
            "timings_s": self.timings,
            "mode_cache": {"hits": self.cache_hits, "misses": self.cache_misses},
            "partial": self.partial,
            "error": self.error,
        }


class _Outputs:
    """Collects written files for the manifest"""

    def __init__(self, directory: Path):
        self.directory = directory
        self.paths: List[Path] = []

    def path(self, name: str) -> Path:
        return self.directory / name

    def add(self, path: Path) -> Path:
        self.paths.append(Path(path))
        sidecar = Path(path).with_suffix(".txt")
        if Path(path).suffix in (".pgm", ".qtpf") and sidecar.exists() and sidecar not in self.paths:
            self.paths.append(sidecar)
        return path

    def records(self) -> List[OutputRecord]:
        records = [OutputRecord(p.name, sha256_file(p), p.stat().st_size) for p in self.paths if p.exists()]
        return sorted(records, key=lambda r: r.path)


def _write_sums(result: ScanResult, out: _Outputs, with_dumps: bool = False):
    for channel, image in result.sums.items():
        out.add(write_pgm(out.path(f"{channel.value}_sum.pgm"), image))
        if with_dumps:
            out.add(write_qtpf(out.path(f"{channel.value}_sum.qtpf"), image.values, image.pitch))


def _write_contrast(result: ScanResult, roi, out: _Outputs):
    rows = [(channel.value, speckle_contrast(image, roi)) for channel, image in result.sums.items()]
    out.add(write_table_csv(out.path("contrast.csv"), ("channel", "contrast"), rows))


def _fiber_scan(config: ScenarioConfig, cache: ModeCache, out: _Outputs):
    scenario = planner.build_fiber_scenario(config, cache)
    incoherent = config.experiment is Experiment.INCOHERENT_SUM
    scan = planner.build_scan(config, realizations=1 if incoherent else None)
    result = run_detuning_scan(scan, scenario, sum_band=config.scan.sum_band_nm * NM)
    if incoherent:
        _write_sums(result, out, with_dumps=True)
        _write_contrast(result, scenario.roi, out)
        return
    out.add(write_curve_csv(out.path("pcc_curve.csv"), result.curves.values()))
    _write_sums(result, out)
    if config.study.residuals:
        largest = scan.detunings[-1]
        table = phase_residuals(scenario.fiber, scan.center_wavelength,
                                detuning_to_omega(largest, scan.center_wavelength), scenario.fiber.length,
                                scenario.pump_offset, scenario.grid, cache)
        header = ("mode", "classical", "two_photon_plus", "two_photon_minus", "exact_classical",
                  "exact_two_photon_plus", "exact_two_photon_minus")
        out.add(write_table_csv(out.path("phase_residuals.csv"), header, table.rows()))


def _defocus(config: ScenarioConfig, cache: ModeCache, out: _Outputs):
    scenario = planner.build_fiber_scenario(config, cache)
    scan = planner.build_scan(config)
    curves = [apply_defocus_study(scan, scenario, dz * UM) for dz in config.study.dz_um]
    out.add(write_curve_csv(out.path("defocus_curves.csv"), curves))


def _phase_matching(config: ScenarioConfig, cache: ModeCache, out: _Outputs):
    scenario = planner.build_fiber_scenario(config, cache)
    scan = planner.build_scan(config)
    spdc = planner.build_spdc(config)
    lengths = [length * MM for length in config.spdc.crystal_lengths_mm]
    curves = phase_matching_study(scan, scenario, spdc, lengths)
    out.add(write_curve_csv(out.path("phase_matching_curves.csv"), curves.values()))


def _wavefront_shaping(config: ScenarioConfig, cache: ModeCache, out: _Outputs):
    system = planner.build_shaping_system(config, cache)
    detunings = planner.shaping_detunings(config)
    reports = []
    for scenario in config.shaping.scenarios:
        mask = compute_focus_mask(scenario, system)
        out.add(write_qtpf(out.path(f"mask_{scenario.value}.qtpf"), mask.phases, mask.macro_pixel))
        if scenario is ShapingScenario.SPDC_SLM_INPUT:
            logger.info("shaped input state keeps %.3f of its power on the mode diagonal",
                        slm_input_state(system, mask).diagonal_power_fraction())
        report = scan_focus_vs_detuning(mask, scenario, detunings, system)
        logger.info("%s: enhancement %.1f, half bandwidth %.3g nm", scenario.value, report.enhancement,
                    report.half_bandwidth * 1e9)
        reports.append(report)
    out.add(write_focus_csv(out.path("focus_curves.csv"), reports))
    rows = [(r.scenario.value, r.enhancement, r.half_bandwidth * 1e9) for r in reports]
    header = ("scenario", "enhancement", "half_bandwidth_nm")
    out.add(write_table_csv(out.path("shaping_summary.csv"), header, rows))


def _mode_mixing(config: ScenarioConfig, cache: ModeCache, out: _Outputs):
    scenario = planner.build_fiber_scenario(config, cache)
    wavelength = config.scan.center_wavelength_nm * NM
    basis = cache(scenario.fiber, wavelength, scenario.grid)
    plane = PLANES[ShapingScenario.SPDC_SLM_OUTPUT]
    rows = []
    for samples in config.study.mixing_pixel_samples:
        pixels = planner.mixing_pixels(config, samples)
        for k in range(config.study.mixing_seeds):
            seed = config.run.seed + k
            mask = random_mask(pixels, samples, scenario.grid.pitch, seed, plane)
            report = slm_mode_mixing_diagnostic(scenario.fiber, mask, seed, wavelength, scenario.grid, cache, basis)
            rows.append((samples * scenario.grid.pitch * 1e6, seed, report.overlap))
        mean = float(np.mean([r[2] for r in rows[-config.study.mixing_seeds:]]))
        logger.info("mode mixing, %d-sample macro-pixels: mean overlap %.3f", samples, mean)
    out.add(write_table_csv(out.path("mode_mixing.csv"), ("macro_pixel_um", "seed", "overlap"), rows))


def _screen_scan(config: ScenarioConfig, out: _Outputs):
    scenario = planner.build_diffuser_scenario(config)
    incoherent = config.experiment is Experiment.INCOHERENT_SUM
    scan = planner.build_scan(config, realizations=1 if incoherent else None)
    result = diffuser_detuning_scan(scan, scenario, band_sum=True, sum_band=config.scan.sum_band_nm * NM)
    first_screen = scenario.screen(realization_seeds(scan.seed, 1)[0], scan.center_wavelength)
    out.add(write_screen(out.path("screen.qtpf"), first_screen))
    if incoherent:
        _write_sums(result, out, with_dumps=True)
        _write_contrast(result, scenario.on_axis_roi(scan.center_wavelength), out)
        return
    out.add(write_curve_csv(out.path("pcc_curve.csv"), result.curves.values()))
    _write_sums(result, out)


def _grating(config: ScenarioConfig, out: _Outputs):
    scenario = planner.build_grating_scenario(config)
    rows = grating_band_study(scenario, [d * NM for d in planner.grating_detunings(config)])
    out.add(write_orders_csv(out.path("orders.csv"), rows))
    spdc = [r for r in rows if r.channel is Channel.SPDC and r.analytical.order == 2]
    if spdc:
        logger.info("coincidence weight in m=2: min %.4f over the band", min(r.numerical.weight for r in spdc))


def _execute(config: ScenarioConfig, cache: ModeCache, out: _Outputs):
    medium, experiment = config.medium, config.experiment
    if medium.is_fiber:
        handlers = {
            Experiment.CORRELATION_SCAN: _fiber_scan,
            Experiment.INCOHERENT_SUM: _fiber_scan,
            Experiment.DEFOCUS_STUDY: _defocus,
            Experiment.PHASE_MATCHING_STUDY: _phase_matching,
            Experiment.WFS: _wavefront_shaping,
            Experiment.MODE_MIXING: _mode_mixing,
        }
        handlers[experiment](config, cache, out)
    elif medium.is_screen:
        _screen_scan(config, out)
    else:
        _grating(config, out)


def run(config: ScenarioConfig, cache: Optional[ModeCache] = None) -> RunManifest:
    """Plan, execute and record one experiment.

    Raises ExperimentError after writing a manifest flagged partial when the
    experiment fails.
    """
    started = time.perf_counter()
    cache = cache if cache is not None else ModeCache(config.run.mode_cache or None)
    plan = planner.validate_and_plan(config, cache)
    for line in plan.summary_lines():
        logger.info(line)
    timings = {"plan": time.perf_counter() - started}

    directory = Path(config.run.output_dir)
    directory.mkdir(parents=True, exist_ok=True)
    out = _Outputs(directory)
    ConfigManager.save(config, out.path("config.ini"))
    out.add(out.path("config.ini"))

    manifest = RunManifest(config.scenario.name, config.experiment.value, config.medium.value, plan.config_hash,
                           __version__, config.run.seed)
    failure: Optional[QtpError] = None
    t0 = time.perf_counter()
    try:
        _execute(config, cache, out)
    except QtpError as e:
        logger.error("experiment failed: %s", e)
        failure = e
        manifest.partial = True
        manifest.error = f"{type(e).__name__}: {e}"
    timings["experiment"] = time.perf_counter() - t0
    timings["total"] = time.perf_counter() - started

    manifest.outputs = out.records()
    manifest.timings = {k: round(v, 3) for k, v in timings.items()}
    manifest.cache_hits, manifest.cache_misses = cache.hits, cache.misses
    write_manifest(out.path(MANIFEST_NAME), manifest.to_dict())
    if failure is not None:
        raise ExperimentError(f"{config.experiment.value} on {config.medium.value} failed: {failure}",
                              manifest) from failure
    return manifest
