"""
Detuning scans over thin elements: diffuser/MCF speckle correlation and
blazed-grating order weights across a band.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..core.errors import ConfigurationError
from ..core.rng import realization_seeds
from ..core.types import Channel, Medium
from ..core.workqueue import WorkQueue
from ..optics.field import ComplexField, Grid, IntensityMap, RegionOfInterest, gaussian_source
from ..optics.metrics import incoherent_sum, pearson_correlation, resample_to_pitch
from ..optics.spectral import detuning_to_omega, pair_wavelengths
from ..twophoton.scan import CorrelationCurve, DetuningScan, ScanResult
from .farfield import classical_farfield, two_photon_farfield
from .grating import GratingSpec, OrderWeight, grating_orders_analytical, numerical_order_weights
from .material import MaterialModel
from .screens import PhaseScreen, generate_diffuser, generate_mcf_screen

logger = logging.getLogger(__name__)


@dataclass
class DiffuserScenario:
    grid: Grid
    macro_pixel: float
    thickness_max: float
    material: MaterialModel
    focal_length: float
    illumination_waist: float
    medium: Medium = Medium.DIFFUSER
    threads: int = 1

    def __post_init__(self):
        if not self.medium.is_screen:
            raise ConfigurationError(f"{self.medium.value} is not a phase-screen medium", "scenario.medium")
        if not self.focal_length > 0:
            raise ConfigurationError(f"focal length must be > 0, got {self.focal_length}", "diffuser.focal_length")

    def screen(self, seed: int, wavelength: float) -> PhaseScreen:
        if self.medium is Medium.MCF:
            # thickness_max is read as the spread of per-core optical paths
            path = self.thickness_max * (self.material.index(wavelength) - 1.0)
            return generate_mcf_screen(self.grid, self.macro_pixel, path, self.material, seed, wavelength)
        return generate_diffuser(self.grid, self.macro_pixel, self.thickness_max, self.material, seed)

    def illumination(self, wavelength: float) -> ComplexField:
        return gaussian_source(self.illumination_waist, (0.0, 0.0), self.grid, wavelength)

    def on_axis_roi(self, wavelength: float) -> RegionOfInterest:
        """Centred square of +-2 diffraction-limited spot widths"""
        spot = wavelength * self.focal_length / (np.pi * self.illumination_waist)
        return RegionOfInterest((0.0, 0.0), 2 * spot)


def diffuser_detuning_scan(scan: DetuningScan, scenario: DiffuserScenario,
                           band_sum: bool = True, sum_band: Optional[float] = None,
                           sum_realization: int = 0) -> ScanResult:
    """Far-field correlation vs detuning for classical light and photon pairs.

    Maps at every wavelength are resampled onto the degenerate far-field
    pitch before they are compared or summed. The band sum is taken over
    +-detunings on the screen of realization `sum_realization`, up to
    `sum_band` when given.
    """
    if not 0 <= sum_realization < scan.realizations:
        raise ConfigurationError(f"sum realization {sum_realization} outside 0..{scan.realizations - 1}",
                                 "scan.sum_realization")
    lam0 = scan.center_wavelength
    pitch0 = lam0 * scenario.focal_length / (scenario.grid.size * scenario.grid.pitch)
    roi = scenario.on_axis_roi(lam0)
    seeds = realization_seeds(scan.seed, scan.realizations)
    envelope = scenario.illumination(lam0)
    scenario.material.check_band([w for d in scan.detunings for w in pair_wavelengths(lam0, d)])

    def maps(r: int, d_lambda: float) -> Dict[Channel, IntensityMap]:
        screen = scenario.screen(seeds[r], lam0)
        classical_wavelength = pair_wavelengths(lam0, d_lambda)[0]
        classical = classical_farfield(screen, envelope, classical_wavelength, scenario.focal_length)
        spdc = two_photon_farfield(screen, envelope, detuning_to_omega(d_lambda, lam0), scenario.focal_length, lam0)
        return {Channel.CLASSICAL: resample_to_pitch(classical, pitch0), Channel.SPDC: resample_to_pitch(spdc, pitch0)}

    references = WorkQueue(scenario.threads, "diffuser references").run(
        lambda r: maps(r, 0.0), list(range(scan.realizations)))

    def task(item):
        r, j = item
        if j == 0:
            return {Channel.CLASSICAL: 1.0, Channel.SPDC: 1.0}
        current = maps(r, scan.detunings[j])
        return {c: pearson_correlation(references[r][c], current[c], roi) for c in current}

    n_det = len(scan.detunings)
    items = [(r, j) for r in range(scan.realizations) for j in range(n_det)]
    results = WorkQueue(scenario.threads, "diffuser scan points").run(task, items)

    detunings = np.array(scan.detunings)
    curves = {}
    for channel in (Channel.CLASSICAL, Channel.SPDC):
        table = np.array([values[channel] for values in results]).reshape(scan.realizations, n_det)
        stderr = table.std(axis=0, ddof=1) / np.sqrt(scan.realizations) if scan.realizations > 1 \
            else np.zeros(n_det)
        curves[channel] = CorrelationCurve(detunings, table.mean(axis=0), stderr, channel, scenario.medium.value)

    sums = {}
    if band_sum:
        kept = [d for d in scan.detunings if sum_band is None or d <= sum_band]
        band = sorted({-d for d in kept} | set(kept))
        band_maps = WorkQueue(scenario.threads, "band sum").run(lambda d: maps(sum_realization, d), band)
        for channel in (Channel.CLASSICAL, Channel.SPDC):
            sums[channel] = incoherent_sum([m[channel] for m in band_maps], label=f"{channel.value} band sum")
    return ScanResult(curves, sums, [w for d in scan.detunings for w in pair_wavelengths(lam0, d)])


@dataclass(frozen=True)
class OrderRow:
    delta_lambda: float
    channel: Channel
    analytical: OrderWeight
    numerical: OrderWeight


@dataclass
class GratingScenario:
    spec: GratingSpec
    grid: Grid
    beam_waist: float
    focal_length: float
    threads: int = 1

    def __post_init__(self):
        if self.beam_waist < 50 * self.spec.period / 2:
            logger.warning("beam waist covers fewer than 50 grating periods; infinite-grating weights may not apply")


def grating_band_study(scenario: GratingScenario, detunings: Sequence[float]) -> List[OrderRow]:
    """Analytical and numerical order weights for both channels at each detuning"""
    spec = scenario.spec
    lam0 = spec.design_wavelength
    envelope = gaussian_source(scenario.beam_waist, (0.0, 0.0), scenario.grid, lam0)
    k0 = 2 * np.pi / lam0

    def study(d_lambda: float) -> List[OrderRow]:
        wavelength = pair_wavelengths(lam0, d_lambda)[0]
        delta_k = 2 * np.pi / wavelength - k0
        rows = []
        classical = classical_farfield(spec, envelope, wavelength, scenario.focal_length)
        analytical = grating_orders_analytical(spec, delta_k, scenario.beam_waist, scenario.focal_length,
                                               Channel.CLASSICAL)
        numerical = numerical_order_weights(classical, spec, wavelength, scenario.focal_length,
                                            [a.order for a in analytical])
        rows.extend(OrderRow(d_lambda, Channel.CLASSICAL, a, n) for a, n in zip(analytical, numerical))

        # scanned photon at lambda-, i.e. detuned opposite to the fixed one
        spdc = two_photon_farfield(spec, envelope, -detuning_to_omega(d_lambda, lam0), scenario.focal_length, lam0)
        analytical = grating_orders_analytical(spec, delta_k, scenario.beam_waist, scenario.focal_length, Channel.SPDC)
        numerical = numerical_order_weights(spdc, spec, wavelength, scenario.focal_length,
                                            [a.order for a in analytical])
        rows.extend(OrderRow(d_lambda, Channel.SPDC, a, n) for a, n in zip(analytical, numerical))
        return rows

    per_detuning = WorkQueue(scenario.threads, "grating detunings").run(study, list(detunings))
    return [row for rows in per_detuning for row in rows]
