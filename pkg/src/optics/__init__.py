"""Sampled fields, Fourier-optics propagation and image statistics"""

from .field import (Grid, ComplexField, IntensityMap, RegionOfInterest, spatial_frequencies,
                    gaussian_source, plane_wave, angular_spectrum_propagate, lens_far_field, far_field_at)
from .metrics import pearson_correlation, speckle_contrast, incoherent_sum, rescale_about_center, resample_to_pitch
from .spectral import omega_from_wavelength, wavelength_from_omega, detuning_to_omega, pair_wavelengths

__all__ = [
    'Grid',
    'ComplexField',
    'IntensityMap',
    'RegionOfInterest',
    'spatial_frequencies',
    'gaussian_source',
    'plane_wave',
    'angular_spectrum_propagate',
    'lens_far_field',
    'far_field_at',
    'pearson_correlation',
    'speckle_contrast',
    'incoherent_sum',
    'rescale_about_center',
    'resample_to_pitch',
    'omega_from_wavelength',
    'wavelength_from_omega',
    'detuning_to_omega',
    'pair_wavelengths',
]
