"""Photon-pair states in fiber mode bases, coincidence speckle and detuning scans"""

from .state import SpdcSpec, TwoPhotonModeState, cnm_thin_crystal, cnm_finite_phase_matching, defocus_cnm
from .speckle import (classical_fiber_speckle, coincidence_amplitude, coincidence_fiber_speckle,
                      advanced_wave_amplitude, coincidence_fiber_speckle_awp, detector_mode_at)
from .residuals import PhaseResidualTable, phase_residuals, second_difference
from .scan import (DetuningScan, CorrelationCurve, FiberScenario, ScanResult, run_detuning_scan,
                   apply_defocus_study, phase_matching_study)

__all__ = [
    'SpdcSpec',
    'TwoPhotonModeState',
    'cnm_thin_crystal',
    'cnm_finite_phase_matching',
    'defocus_cnm',
    'classical_fiber_speckle',
    'coincidence_amplitude',
    'coincidence_fiber_speckle',
    'advanced_wave_amplitude',
    'coincidence_fiber_speckle_awp',
    'detector_mode_at',
    'PhaseResidualTable',
    'phase_residuals',
    'second_difference',
    'DetuningScan',
    'CorrelationCurve',
    'FiberScenario',
    'ScanResult',
    'run_detuning_scan',
    'apply_defocus_study',
    'phase_matching_study',
]
