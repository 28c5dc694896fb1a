"""Multimode fiber eigenmodes, modal propagation and dispersion"""

from .modes import FiberSpec, FiberMode, ModeBasis, solve_modes
from .propagation import modal_decompose, modal_compose, propagate_in_fiber, transmit
from .dispersion import match_modes, beta_derivative_table, beta_derivatives, matched_betas
from .cache import ModeCache, basis_key

__all__ = [
    'FiberSpec',
    'FiberMode',
    'ModeBasis',
    'solve_modes',
    'modal_decompose',
    'modal_compose',
    'propagate_in_fiber',
    'transmit',
    'match_modes',
    'beta_derivative_table',
    'beta_derivatives',
    'matched_betas',
    'ModeCache',
    'basis_key',
]
