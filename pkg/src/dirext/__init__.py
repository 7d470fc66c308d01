"""Directional multivariate extremes: QR-oriented orthants, empirical level
sets, copula/GEV models and a dam flood case study."""

from .detector import DetectionConfig, DetectionResult, Label, Mode, containment_check, detect, orthant_probabilities
from .directions import classical_directions, first_pca_direction
from .geometry import build_rotation, canonical_diagonal, orthant_contains, rotate_sample

__all__ = [
    "DetectionConfig",
    "DetectionResult",
    "Label",
    "Mode",
    "build_rotation",
    "canonical_diagonal",
    "classical_directions",
    "containment_check",
    "detect",
    "first_pca_direction",
    "orthant_contains",
    "orthant_probabilities",
    "rotate_sample",
]

__version__ = "0.1.0"
