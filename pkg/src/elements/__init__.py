"""Thin diffusers, multi-core-fiber screens and blazed gratings"""

from .material import MaterialModel, phase_factor
from .screens import PhaseScreen, generate_diffuser, generate_mcf_screen
from .grating import (GratingSpec, OrderWeight, grating_thickness, grating_orders_analytical,
                      numerical_order_weights, peak_position)
from .farfield import apply_phase_element, element_phase, classical_farfield, two_photon_farfield
from .scan import DiffuserScenario, GratingScenario, OrderRow, diffuser_detuning_scan, grating_band_study

__all__ = [
    'MaterialModel',
    'phase_factor',
    'PhaseScreen',
    'generate_diffuser',
    'generate_mcf_screen',
    'GratingSpec',
    'OrderWeight',
    'grating_thickness',
    'grating_orders_analytical',
    'numerical_order_weights',
    'peak_position',
    'apply_phase_element',
    'element_phase',
    'classical_farfield',
    'two_photon_farfield',
    'DiffuserScenario',
    'GratingScenario',
    'OrderRow',
    'diffuser_detuning_scan',
    'grating_band_study',
]
