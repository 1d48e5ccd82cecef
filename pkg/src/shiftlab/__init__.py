"""Exact certification of weighted shifts on directed forests.

Core layers: ``forest`` (graph model), ``shifts`` (weights, tails, moments),
``hypo`` (power hyponormality), ``measures`` (atomic measures and moment
sequences), ``subnormal`` (certificates and backward extensions).  The
``service`` subpackage wraps everything as a FastAPI app; ``cli`` is a thin
command-line client over the same handlers.
"""

from .errors import ShiftLabError
from .forest import DirectedForest, validate_forest
from .measures import AtomicMeasure, MomentSeq
from .shifts import TailProfile, WeightedShift

__all__ = [
    "AtomicMeasure",
    "DirectedForest",
    "MomentSeq",
    "ShiftLabError",
    "TailProfile",
    "WeightedShift",
    "validate_forest",
]

__version__ = "0.1.0"
