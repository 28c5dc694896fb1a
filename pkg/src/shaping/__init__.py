"""Wavefront shaping with a phase-only SLM in front of or behind the fiber"""

from .slm import (SlmMask, FocusReport, ShapingSystem, ModeMixingReport, flat_mask, random_mask,
                  transmission_coefficients, compute_focus_mask, focus_enhancement, scan_focus_vs_detuning,
                  slm_input_state, slm_mode_mixing_diagnostic)

__all__ = [
    'SlmMask',
    'FocusReport',
    'ShapingSystem',
    'ModeMixingReport',
    'flat_mask',
    'random_mask',
    'transmission_coefficients',
    'compute_focus_mask',
    'focus_enhancement',
    'scan_focus_vs_detuning',
    'slm_input_state',
    'slm_mode_mixing_diagnostic',
]
