"""Exact curvature and classification of pp-waves with polynomial potential."""
from .metric import AdaptedTransformation, PpWaveMetric, TwosymError, apply_transformation
from .poly import NumericPoly, Poly

__all__ = [
    "AdaptedTransformation",
    "NumericPoly",
    "Poly",
    "PpWaveMetric",
    "TwosymError",
    "apply_transformation",
]
