"""bandedge: spectral-edge experiments for random periodic band matrices."""

__version__ = "0.1.0"

from .errors import BudgetError, DiagramError, NumericError
from .sampler import (
    BandMatrix,
    BandParams,
    SeedSpec,
    enumerate_sign_assignments,
    sample_band_matrix,
    validate,
)
from .circulant import CirculantGraph, WalkAsymptotics

__all__ = [
    "BandMatrix",
    "BandParams",
    "BudgetError",
    "CirculantGraph",
    "DiagramError",
    "NumericError",
    "SeedSpec",
    "WalkAsymptotics",
    "enumerate_sign_assignments",
    "sample_band_matrix",
    "validate",
    "__version__",
]
