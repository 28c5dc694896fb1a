"""Image statistics shared by every medium: correlation, contrast, sums"""

import logging
from typing import Optional, Sequence

import cv2
import numpy as np

from ..core.errors import ConfigurationError, GridMismatchError, UndefinedCorrelationError
from .field import IntensityMap, RegionOfInterest

logger = logging.getLogger(__name__)


def _roi_samples(image: IntensityMap, roi: Optional[RegionOfInterest]) -> np.ndarray:
    if roi is None:
        roi = RegionOfInterest.centered_fraction(image.shape, image.pitch)
    mask = roi.mask(image.shape, image.pitch, image.origin)
    return image.values[mask]


def pearson_correlation(a: IntensityMap, b: IntensityMap, roi: Optional[RegionOfInterest] = None) -> float:
    """Centred, normalised covariance of two maps over an ROI"""
    if not a.congruent(b):
        raise GridMismatchError(f"maps are not congruent: {a.shape}@{a.pitch:.4e} vs {b.shape}@{b.pitch:.4e}")
    sa = _roi_samples(a, roi)
    sb = _roi_samples(b, roi)
    if sa.size < 4:
        raise ConfigurationError(f"ROI holds {sa.size} samples, need >= 4", "roi")
    da = sa - sa.mean()
    db = sb - sb.mean()
    na = np.sqrt(np.sum(da * da))
    nb = np.sqrt(np.sum(db * db))
    if na == 0 or nb == 0:
        raise UndefinedCorrelationError("correlation undefined: map is constant inside the ROI")
    return float(np.clip(np.sum(da * db) / (na * nb), -1.0, 1.0))


def speckle_contrast(image: IntensityMap, roi: Optional[RegionOfInterest] = None) -> float:
    """Standard deviation over mean inside the ROI"""
    samples = _roi_samples(image, roi)
    mean = samples.mean()
    if not mean > 0:
        raise UndefinedCorrelationError("contrast undefined: zero mean intensity inside the ROI")
    return float(samples.std() / mean)


def incoherent_sum(patterns: Sequence[IntensityMap], weights: Optional[Sequence[float]] = None,
                   label: str = "incoherent sum") -> IntensityMap:
    """Weighted element-wise sum of congruent maps"""
    if not patterns:
        raise ConfigurationError("at least one pattern is required", "patterns")
    if weights is None:
        weights = [1.0] * len(patterns)
    if len(weights) != len(patterns):
        raise ConfigurationError(f"{len(weights)} weights for {len(patterns)} patterns", "weights")
    weights = np.asarray(weights, dtype=np.float64)
    if np.any(weights < 0) or not np.any(weights > 0):
        raise ConfigurationError("weights must be >= 0 with at least one positive", "weights")
    first = patterns[0]
    total = np.zeros(first.shape)
    for pattern, weight in zip(patterns, weights):
        if not first.congruent(pattern):
            raise GridMismatchError("incoherent_sum needs congruent maps")
        total += weight * pattern.values
    return IntensityMap(total, first.pitch, label, first.origin)


def rescale_about_center(image: IntensityMap, factor: float, pitch: Optional[float] = None) -> IntensityMap:
    """Dilate a map by `factor` about the array centre (bilinear, zero fill).

    out(x) = in(x / factor) in physical units; the result keeps the input
    shape and takes `pitch` (default: unchanged).
    """
    if not factor > 0:
        raise ConfigurationError(f"scale factor must be > 0, got {factor}", "rescale.factor")
    rows, cols = image.shape
    cx, cy = cols // 2, rows // 2
    matrix = np.array([[factor, 0.0, (1 - factor) * cx],
                       [0.0, factor, (1 - factor) * cy]], dtype=np.float64)
    warped = cv2.warpAffine(image.values.astype(np.float32), matrix, (cols, rows),
                            flags=cv2.INTER_LINEAR, borderMode=cv2.BORDER_CONSTANT, borderValue=0.0)
    warped = np.maximum(warped.astype(np.float64), 0.0)
    return IntensityMap(warped, image.pitch if pitch is None else pitch, image.label, image.origin)


def resample_to_pitch(image: IntensityMap, pitch: float) -> IntensityMap:
    """Resample onto a grid of the same shape with a different physical pitch"""
    if np.isclose(image.pitch, pitch, rtol=1e-12, atol=0.0):
        return image
    return rescale_about_center(image, image.pitch / pitch, pitch=pitch)
