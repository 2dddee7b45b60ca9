"""
Dyadic RBMO Toolkit

Discrete dyadic lattices and doubling filtrations for nondoubling measures,
with the martingale RBMO_Σ and H¹_Σ norms, Calderón-Zygmund operators,
sparse domination and the operator-valued endpoint estimate.
"""

__version__ = "0.1.0"
__author__ = "Dyadic RBMO Contributors"

from .core.toolkit import RBMOToolkit, RunResult
from .core.lattice import Lattice, LatticeParams, build_lattice
from .core.filtration import Filtration, build_filtration
from .core.measure import PointMeasure
from .core.validator import InvariantEngine, InvariantReport

__all__ = [
    "RBMOToolkit",
    "RunResult",
    "PointMeasure",
    "Lattice",
    "LatticeParams",
    "build_lattice",
    "Filtration",
    "build_filtration",
    "InvariantEngine",
    "InvariantReport",
]
