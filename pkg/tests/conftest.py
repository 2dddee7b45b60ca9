"""
Pytest configuration and shared fixtures for the dyadic RBMO tests.

Provides small measures, their lattices and filtrations, and field corpora
used across the test suite.
"""

import pytest
import tempfile
from pathlib import Path
from typing import List

import numpy as np

from dyadic_rbmo.core.filtration import Filtration, build_filtration
from dyadic_rbmo.core.lattice import Cube, Lattice, LatticeParams, build_lattice
from dyadic_rbmo.core.measure import PointMeasure, ScalarField
from dyadic_rbmo.core.validator import InvariantEngine
from dyadic_rbmo.kernels import CauchyKernel
from dyadic_rbmo.operators import DiscreteOperator
from dyadic_rbmo.utils.corpus import random_fields, resolve_measure


@pytest.fixture
def uniform_measure() -> PointMeasure:
    """16-point uniform grid on [0, 1]."""
    return resolve_measure("builtin:uniform:16")


@pytest.fixture
def gaussian_measure() -> PointMeasure:
    """24-point discretized Gaussian (nondoubling tails)."""
    return resolve_measure("builtin:gaussian:24")


@pytest.fixture
def three_point_measure() -> PointMeasure:
    """Hand measure with unequal masses."""
    return PointMeasure.from_arrays([0.0, 0.25, 1.0], [0.1, 0.2, 0.3])


@pytest.fixture
def lattice(uniform_measure) -> Lattice:
    return build_lattice(uniform_measure, LatticeParams())


@pytest.fixture
def filtration(lattice) -> Filtration:
    return build_filtration(lattice)


@pytest.fixture
def gaussian_filtration(gaussian_measure) -> Filtration:
    return build_filtration(build_lattice(gaussian_measure, LatticeParams()))


@pytest.fixture
def hand_lattice():
    """Build a lattice from (generation, members, parent, doubling) rows; ids follow row order."""

    def build(mu: PointMeasure, rows) -> Lattice:
        cubes = []
        generations = {}
        for cube_id, (generation, members, parent, doubling) in enumerate(rows):
            members = np.asarray(members, dtype=int)
            cubes.append(Cube(cube_id, generation, int(members[0]), 1.0, members, parent, doubling))
            generations.setdefault(generation, []).append(cube_id)
            if parent is not None:
                cubes[parent].children.append(cube_id)
        return Lattice(mu, LatticeParams(), cubes, generations, 0)

    return build


@pytest.fixture
def fields(uniform_measure) -> List[ScalarField]:
    """Five Gaussian random fields on the uniform measure."""
    return random_fields(uniform_measure, 5, seed=0)


@pytest.fixture
def operator(uniform_measure) -> DiscreteOperator:
    return DiscreteOperator.from_kernel(CauchyKernel(), uniform_measure)


@pytest.fixture
def engine() -> InvariantEngine:
    return InvariantEngine()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


# Pytest markers for different test categories
pytest_plugins = []


def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line("markers", "slow: marks tests as slow")
    config.addinivalue_line("markers", "integration: marks tests as integration tests")
    config.addinivalue_line("markers", "unit: marks tests as unit tests")
