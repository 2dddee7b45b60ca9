"""Core components: measures, the dyadic lattice, the doubling filtration and invariant checks."""

from .filtration import Filtration, FiltrationError, build_filtration, cond_exp, mart_diff
from .lattice import Cube, Lattice, LatticeError, LatticeParams, build_lattice
from .measure import Ball, PointMeasure, ScalarField, is_doubling, load_field, load_measure
from .toolkit import RBMOToolkit, RunResult
from .validator import InvariantCheck, InvariantEngine, InvariantLevel, InvariantReport

__all__ = [
    "Ball",
    "PointMeasure",
    "ScalarField",
    "is_doubling",
    "load_measure",
    "load_field",
    "Cube",
    "Lattice",
    "LatticeError",
    "LatticeParams",
    "build_lattice",
    "Filtration",
    "FiltrationError",
    "build_filtration",
    "cond_exp",
    "mart_diff",
    "InvariantCheck",
    "InvariantEngine",
    "InvariantLevel",
    "InvariantReport",
    "RBMOToolkit",
    "RunResult",
]
