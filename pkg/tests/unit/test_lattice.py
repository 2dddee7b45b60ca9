"""
Unit tests for the dyadic lattice construction.

Tests parameter handling, the structural invariants of built lattices and
lattice export.
"""

import numpy as np
import pytest

from dyadic_rbmo.core.lattice import (
    Lattice, LatticeError, LatticeParams, boundary_report, build_lattice, choose_radius, five_r_cover, generation_range,
)
from dyadic_rbmo.core.measure import Ball, PointMeasure, is_doubling
from dyadic_rbmo.utils.corpus import resolve_measure


class TestLatticeParams:
    """Test cases for LatticeParams."""

    def test_default_A_is_test_scale(self):
        """Test that test mode defaults to A = beta = 16."""
        params = LatticeParams()

        assert params.beta == 16.0
        assert params.A == 16.0

    def test_paper_mode_A_exceeds_beta(self):
        """Test that paper mode derives the first power of beta above it."""
        params = LatticeParams.for_mode("paper", dim=1)

        assert params.A == params.beta ** 2
        assert params.A > params.beta

    def test_explicit_A_kept(self):
        """Test that an explicit A is not replaced."""
        assert LatticeParams(A=8.0).A == 8.0

    def test_paper_mode_defaults(self):
        """Test that paper mode ties beta to alpha^(d+1)."""
        params = LatticeParams.for_mode("paper", dim=1)

        assert params.ell == 2
        assert params.validate(1) == []
        assert params.x0_scaled_radius

    def test_paper_mode_small_alpha_rejected(self):
        """Test that paper mode flags a small alpha."""
        issues = LatticeParams.for_mode("paper", dim=1, alpha=4.0).validate(1)

        assert any("alpha" in issue for issue in issues)

    def test_paper_mode_wrong_ell_rejected(self):
        """Test that paper mode flags an ell override breaking beta = alpha^(d+1)."""
        issues = LatticeParams.for_mode("paper", dim=1, ell=3).validate(1)

        assert any("ell" in issue for issue in issues)

    def test_test_mode_overrides(self):
        """Test that test mode accepts ell and generation overrides."""
        params = LatticeParams.for_mode("test", dim=1, alpha=3.0, ell=1, k_min=-1)

        assert params.alpha == 3.0
        assert params.beta == 3.0
        assert params.k_min == -1
        assert params.validate(1) == []

    def test_invalid_values_reported(self):
        """Test that alpha <= 1 and reversed generation bounds are reported."""
        issues = LatticeParams(alpha=0.5, A=2.0, k_min=3, k_max=1).validate(1)

        assert len(issues) == 2


class TestBuildLattice:
    """Test cases for build_lattice."""

    def test_structural_invariants(self, lattice):
        """Test partition, nesting, sibling disjointness and the radius sandwich."""
        assert lattice.partition_violations() == []
        assert lattice.nesting_violations() == []
        assert lattice.disjointness_violations() == []
        assert lattice.sandwich_violations() == []

    def test_single_root(self, lattice, uniform_measure):
        """Test that the coarsest generation is one cube holding everything."""
        assert len(lattice.generation(lattice.k_min)) == 1
        assert lattice.root.size == uniform_measure.size

    def test_finest_generation_is_doubling_singletons(self, lattice, uniform_measure):
        """Test that the construction runs until every cube is a doubling singleton."""
        finest = lattice.generation(lattice.k_max)

        assert len(finest) == uniform_measure.size
        assert all(c.is_singleton and c.is_db_doubling for c in finest)

    def test_labels_and_ancestors(self, lattice):
        """Test that labels point at the cube containing each point."""
        for k in lattice.generations:
            labels = lattice.labels(k)
            assert np.all(labels >= 0)
            for index, cube_id in enumerate(labels):
                assert index in lattice.cube(int(cube_id)).members
        chain = lattice.ancestors(lattice.generations[lattice.k_max][0])
        assert chain[-1] == lattice.root.id
        assert len(chain) == lattice.k_max - lattice.k_min + 1

    def test_nondoubling_measure(self, gaussian_measure):
        """Test the invariants on a measure with nondoubling tails."""
        lat = build_lattice(gaussian_measure)

        assert lat.partition_violations() == []
        assert lat.nesting_violations() == []
        assert 0.0 <= lat.nondoubling_decay_report()["fraction"] <= 1.0

    def test_planar_measure(self):
        """Test that a two-dimensional grid builds a valid lattice."""
        lat = build_lattice(resolve_measure("builtin:uniform2d:16"))

        assert lat.partition_violations() == []
        assert lat.disjointness_violations() == []

    def test_single_point_measure(self):
        """Test that a one-point measure yields a single doubling cube per generation."""
        lat = build_lattice(PointMeasure.from_arrays([0.0], [1.0]))

        assert all(len(ids) == 1 for ids in lat.generations.values())
        assert lat.root.is_db_doubling

    def test_deterministic(self, uniform_measure):
        """Test that two builds export the same lattice."""
        first = build_lattice(uniform_measure, LatticeParams()).to_dict()
        second = build_lattice(uniform_measure, LatticeParams()).to_dict()

        assert first == second

    def test_generation_range_brackets_scales(self, uniform_measure):
        """Test that the default range spans the diameter and the minimum distance."""
        params = LatticeParams()
        k_min, k_max = generation_range(uniform_measure, params)
        top = params.beta * params.alpha ** params.radius_index

        assert top * params.A ** (-k_min) >= uniform_measure.diameter
        assert top * params.A ** (-k_max) < uniform_measure.min_distance

    def test_containment_report_fractions(self, lattice):
        """Test that containment fractions are proportions."""
        report = lattice.containment_report()

        assert 0.0 <= report["fraction"] <= 1.0
        assert report["fraction"] <= report["ball_inside_cube_fraction"]


class TestLatticeExport:
    """Test cases for lattice export and reload."""

    def test_round_trip(self, lattice, uniform_measure):
        """Test that a reloaded lattice has the same cubes."""
        reloaded = Lattice.from_dict(uniform_measure, lattice.to_dict())

        assert reloaded.generations == lattice.generations
        for a, b in zip(lattice.cubes, reloaded.cubes):
            assert a.members.tolist() == b.members.tolist()
            assert a.children == b.children
        assert reloaded.params == lattice.params

    def test_other_measure_rejected(self, lattice, three_point_measure):
        """Test that a lattice cannot be attached to a different measure."""
        with pytest.raises(ValueError):
            Lattice.from_dict(three_point_measure, lattice.to_dict())


class TestLatticePrimitives:
    """Test cases for the covering, radius and boundary primitives."""

    def test_five_r_cover_keeps_disjoint_balls(self, three_point_measure):
        """Test the greedy selection by decreasing radius."""
        candidates = [(0, 0.2), (1, 0.1), (2, 0.5)]

        assert five_r_cover(three_point_measure, candidates) == [2, 0]
        assert five_r_cover(three_point_measure, []) == []

    def test_five_r_cover_forced_first(self, three_point_measure):
        """Test that the forced ball is selected first."""
        assert five_r_cover(three_point_measure, [(0, 0.3), (1, 0.1), (2, 0.5)], forced=0) == [0, 2]

    def test_five_r_cover_three_unit_balls(self):
        """Test centers 0, 1 and 10 with radius 1 and the first ball forced."""
        mu = PointMeasure.from_arrays([0.0, 1.0, 10.0], np.ones(3))

        assert five_r_cover(mu, [(0, 1.0), (1, 1.0), (2, 1.0)], forced=0) == [0, 2]
        assert mu.distances[1, 0] <= 5.0

    def test_five_r_cover_identical_balls(self, three_point_measure):
        """Test that two identical balls give one selection."""
        assert five_r_cover(three_point_measure, [(1, 0.1), (1, 0.1)]) == [0]

    def test_five_r_cover_small_forced_radius(self, three_point_measure):
        """Test that a forced radius below half the largest raises."""
        with pytest.raises(LatticeError):
            five_r_cover(three_point_measure, [(0, 0.2), (1, 0.1), (2, 0.5)], forced=1)

    def test_choose_radius_in_range(self, lattice, uniform_measure):
        """Test that the radius is doubling or the lower end of the range."""
        params = lattice.params
        k = lattice.k_min + 1
        base = params.base_radius(k)
        for x in range(uniform_measure.size):
            r = choose_radius(uniform_measure, x, k, params)
            assert base <= r <= params.beta * base * (1 + 1e-9)
            ball = Ball(tuple(uniform_measure.points[x]), r)
            assert r == base or is_doubling(uniform_measure, ball, params.alpha, params.beta)

    def test_boundary_report(self, lattice):
        """Test the collar masses of the root and of a finer cube."""
        root = boundary_report(lattice, lattice.root.id, 1)
        assert root.ext_mass == 0.0
        assert root.int_mass == 0.0
        assert root.passed

        cube_id = lattice.generation(lattice.k_min + 1)[0].id
        report = boundary_report(lattice, cube_id, 2)
        assert report.ext_mass >= 0.0
        assert report.int_mass >= 0.0
        assert report.bound > 0.0

    def test_boundary_scale_index(self, lattice):
        """Test that the scale index must be positive."""
        with pytest.raises(ValueError):
            boundary_report(lattice, lattice.root.id, 0)


class TestBundledMeasures:
    """Test cases for lattices over the bundled measures in test mode."""

    @pytest.mark.parametrize(
        "spec",
        [
            "builtin:uniform:64",
            "builtin:uniform2d:64",
            "builtin:cantor:32",
            "builtin:gaussian:64",
            "builtin:spike:65",
            "builtin:comb:64",
        ],
    )
    def test_asserted_invariants(self, engine, spec):
        """Test partition, nesting, 5B disjointness and the radius sandwich on every bundled measure."""
        report = engine.check_lattice(build_lattice(resolve_measure(spec)))

        assert report.passed, [c.name for c in report.failures]

    @pytest.mark.parametrize(
        "spec",
        ["builtin:uniform:16", "builtin:uniform:64", "builtin:uniform:256", "builtin:cantor:8", "builtin:cantor:32"],
    )
    def test_containment_is_complete(self, spec):
        """Test that B_Q ∩ supp ⊂ Q ⊂ 28 B_Q holds for every cube on the uniform and Cantor measures."""
        report = build_lattice(resolve_measure(spec)).containment_report()

        assert report["fraction"] == 1.0, report["failures"]
