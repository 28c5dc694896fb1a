"""Built-in scenario configurations for the reference studies"""

from typing import Dict

from .config import (DiffuserSection, FiberSection, GratingSection, GridSection, ScanSection, ScenarioConfig,
                     ScenarioSection, ShapingSection, SpdcSection, StudySection)
from .types import Experiment, Medium

FIBER_DETUNINGS_NM = (0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 2.0, 3.0, 5.0, 7.5, 10.0, 15.0, 20.0)
DIFFUSER_DETUNINGS_NM = (0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0, 40.0)


def _fig2() -> ScenarioConfig:
    return ScenarioConfig(
        scenario=ScenarioSection("fig2", Medium.FIBER_STEP, Experiment.CORRELATION_SCAN),
        grid=GridSection(256, 0.25),
        fiber=FiberSection(core_radius_um=25.0, numerical_aperture=0.2, length_cm=10.0),
        scan=ScanSection(center_wavelength_nm=810.0, detunings_nm=FIBER_DETUNINGS_NM, realizations=23),
    )


def _fig3_4() -> ScenarioConfig:
    return ScenarioConfig(
        scenario=ScenarioSection("fig3-4", Medium.DIFFUSER, Experiment.CORRELATION_SCAN),
        grid=GridSection(512, 2.0),
        scan=ScanSection(center_wavelength_nm=808.0, detunings_nm=DIFFUSER_DETUNINGS_NM, realizations=30,
                         sum_band_nm=40.0),
        diffuser=DiffuserSection(macro_pixel_samples=8, thickness_max_waves=40.0, illumination_waist_samples=32.0),
    )


def _fig5() -> ScenarioConfig:
    return ScenarioConfig(
        scenario=ScenarioSection("fig5", Medium.GRATING, Experiment.GRATING_ORDERS),
        # 16 samples per 20 um period
        grid=GridSection(1024, 1.25),
        scan=ScanSection(center_wavelength_nm=808.0, detunings_nm=(0.0,), realizations=1),
        grating=GratingSection(period_um=20.0, index=1.5, beam_waist_periods=16.0, band_nm=40.0, band_step_nm=5.0),
    )


def _fig6() -> ScenarioConfig:
    return ScenarioConfig(
        scenario=ScenarioSection("fig6", Medium.FIBER_STEP, Experiment.WFS),
        grid=GridSection(256, 0.25),
        fiber=FiberSection(core_radius_um=25.0, numerical_aperture=0.2, length_cm=20.0),
        scan=ScanSection(center_wavelength_nm=810.0, detunings_nm=(0.0,), realizations=1),
        shaping=ShapingSection(),
    )


def _fig_s1_s2() -> ScenarioConfig:
    return ScenarioConfig(
        scenario=ScenarioSection("figS1-S2", Medium.FIBER_STEP, Experiment.PHASE_MATCHING_STUDY),
        grid=GridSection(256, 0.25),
        fiber=FiberSection(core_radius_um=25.0, numerical_aperture=0.2, length_cm=10.0),
        spdc=SpdcSection(pump_wavelength_nm=405.0, pump_waist_um=500.0, magnification=10.0,
                         crystal_lengths_mm=(1.0, 2.0, 4.0, 8.0, 16.0)),
        scan=ScanSection(center_wavelength_nm=810.0, detunings_nm=FIBER_DETUNINGS_NM, realizations=23),
    )


def _fig_s3_s4() -> ScenarioConfig:
    return ScenarioConfig(
        scenario=ScenarioSection("figS3-S4", Medium.FIBER_STEP, Experiment.DEFOCUS_STUDY),
        grid=GridSection(256, 0.25),
        fiber=FiberSection(core_radius_um=25.0, numerical_aperture=0.2, length_cm=10.0),
        scan=ScanSection(center_wavelength_nm=810.0, detunings_nm=(0.0, 0.5, 1.0, 2.0, 5.0), realizations=23,
                         method="awp"),
        study=StudySection(dz_um=(0.0, 10.0, 20.0, 40.0, 100.0)),
    )


PRESETS = {
    "fig2": _fig2,
    "fig3-4": _fig3_4,
    "fig5": _fig5,
    "fig6": _fig6,
    "figS1-S2": _fig_s1_s2,
    "figS3-S4": _fig_s3_s4,
}


def built_in_presets() -> Dict[str, ScenarioConfig]:
    """Fresh copies of every preset, keyed by name"""
    return {name: factory() for name, factory in PRESETS.items()}


def preset(name: str) -> ScenarioConfig:
    if name not in PRESETS:
        raise KeyError(name)
    return PRESETS[name]()


def describe(config: ScenarioConfig) -> str:
    """One-line summary for the preset listing"""
    scenario = config.scenario
    parts = [f"{scenario.medium.value}", f"{scenario.experiment.value}",
             f"lambda0={config.scan.center_wavelength_nm:g} nm"]
    if scenario.medium.is_fiber:
        parts.append(f"L={config.fiber.length_cm:g} cm")
    return ", ".join(parts)

