"""
Unit tests for point measures, balls and fields.

Tests construction, ball masses, the doubling test and file round trips.
"""

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dyadic_rbmo.core.measure import (
    Ball, PointMeasure, ScalarField, ball_mass, field_values, is_doubling, load_field, load_measure,
    restrict, save_field, save_measure,
)


class TestPointMeasure:
    """Test cases for PointMeasure construction."""

    def test_points_are_sorted(self):
        """Test that points come back in lexicographic order."""
        mu = PointMeasure.from_arrays([1.0, 0.0, 0.5], [0.1, 0.2, 0.3])

        assert mu.points[:, 0].tolist() == [0.0, 0.5, 1.0]
        assert mu.weights.tolist() == pytest.approx([0.2, 0.3, 0.1])

    def test_duplicates_are_merged(self):
        """Test that coincident points add their masses."""
        mu = PointMeasure.from_arrays([0.0, 0.0, 1.0], [0.1, 0.2, 0.3])

        assert mu.size == 2
        assert mu.weights.tolist() == pytest.approx([0.3, 0.3])

    @pytest.mark.parametrize("weights", [[0.1, 0.0], [0.1, -0.2], [0.1, float("nan")]])
    def test_nonpositive_weight_rejected(self, weights):
        """Test that zero, negative and non-finite weights raise."""
        with pytest.raises(ValueError):
            PointMeasure.from_arrays([0.0, 1.0], weights)

    def test_empty_measure_rejected(self):
        """Test that an empty point set raises."""
        with pytest.raises(ValueError):
            PointMeasure.from_arrays([], [])

    def test_length_mismatch_rejected(self):
        """Test that points and weights must agree in length."""
        with pytest.raises(ValueError):
            PointMeasure.from_arrays([0.0, 1.0], [1.0])

    def test_growth_degree_defaults_to_dimension(self):
        """Test the default growth degree for a planar measure."""
        mu = PointMeasure.from_arrays([[0.0, 0.0], [1.0, 0.0]], [0.5, 0.5])

        assert mu.dim == 2
        assert mu.growth_degree == 2.0

    def test_measure_id_is_stable(self, three_point_measure):
        """Test that equal measures share an id and different ones do not."""
        same = PointMeasure.from_arrays([1.0, 0.25, 0.0], [0.3, 0.2, 0.1])
        other = PointMeasure.from_arrays([0.0, 0.25, 1.0], [0.1, 0.2, 0.4])

        assert same.measure_id == three_point_measure.measure_id
        assert other.measure_id != three_point_measure.measure_id

    def test_total_mass(self, three_point_measure):
        """Test the total mass."""
        assert three_point_measure.total_mass == pytest.approx(0.6)

    def test_nearest_distances(self, three_point_measure):
        """Test distances to the closest other point."""
        assert three_point_measure.nearest_distances.tolist() == pytest.approx([0.25, 0.25, 0.75])

    def test_restrict_keeps_selected_points(self, three_point_measure):
        """Test restriction to a subset of the support."""
        sub = restrict(three_point_measure, [2, 0])

        assert sub.size == 2
        assert sub.weights.tolist() == pytest.approx([0.1, 0.3])

    def test_restrict_empty_rejected(self, three_point_measure):
        """Test that restricting to nothing raises."""
        with pytest.raises(ValueError):
            restrict(three_point_measure, [])


class TestBalls:
    """Test cases for balls and the doubling test."""

    def test_closed_ball_mass(self, three_point_measure):
        """Test that the boundary point counts toward the mass."""
        assert ball_mass(three_point_measure, Ball((0.0,), 0.25)) == pytest.approx(0.3)

    def test_mass_at_matches_ball_mass(self, three_point_measure):
        """Test that sorted-distance masses agree with direct ball masses."""
        radii = [0.1, 0.25, 0.8, 2.0]
        masses = three_point_measure.mass_at(1, radii)

        for radius, mass in zip(radii, masses):
            assert mass == pytest.approx(ball_mass(three_point_measure, Ball.around(three_point_measure, 1, radius)))

    def test_radius_must_be_positive(self):
        """Test that a degenerate radius raises."""
        with pytest.raises(ValueError):
            Ball((0.0,), 0.0)

    def test_zero_mass_ball_doubling_iff_dilate_null(self, three_point_measure):
        """Test the zero-mass convention of the doubling test."""
        far = Ball((5.0,), 0.1)
        near = Ball((0.5,), 0.1)

        assert is_doubling(three_point_measure, far, 2.0, 4.0)
        assert not is_doubling(three_point_measure, near, 4.0, 16.0)

    def test_doubling_ball(self, uniform_measure):
        """Test that a large ball on the uniform grid is doubling."""
        assert is_doubling(uniform_measure, Ball((0.5,), 0.5), 4.0, 16.0)

    def test_alpha_must_exceed_one(self, three_point_measure):
        """Test that alpha <= 1 raises."""
        with pytest.raises(ValueError):
            is_doubling(three_point_measure, Ball((0.0,), 1.0), 1.0, 4.0)

    def test_canonical_balls_include_atomic_radius(self, three_point_measure):
        """Test that every center has a ball holding only itself."""
        family = three_point_measure.canonical_balls(4.0)

        for i in range(three_point_measure.size):
            own = family.counts[family.centers == i]
            assert own.min() == 1

    def test_canonical_radii(self, three_point_measure):
        """Test the distances with their alpha-multiples and 1/alpha-scalings."""
        grid = three_point_measure.canonical_radii(4.0)

        assert grid.tolist() == [0.0625, 0.1875, 0.25, 0.75, 1.0, 3.0, 4.0]
        assert PointMeasure.from_arrays([2.0], [1.0]).canonical_radii(4.0).tolist() == [1.0]

    @given(st.lists(st.integers(min_value=-80, max_value=80), min_size=1, max_size=12, unique=True))
    @settings(max_examples=30, deadline=None)
    def test_whole_support_ball_holds_all_mass(self, xs):
        """Test that a ball of radius diam around any point holds the total mass."""
        mu = PointMeasure.from_arrays(np.asarray(xs) / 8.0, np.ones(len(xs)))
        radius = max(mu.diameter, 1.0)

        assert mu.mass_at(0, radius)[0] == pytest.approx(mu.total_mass)


class TestFields:
    """Test cases for scalar fields."""

    def test_length_checked(self, three_point_measure):
        """Test that a field must have one value per point."""
        with pytest.raises(ValueError):
            ScalarField.on(three_point_measure, [1.0, 2.0])

    def test_values_are_read_only(self, three_point_measure):
        """Test that field values cannot be modified in place."""
        f = ScalarField.on(three_point_measure, [1.0, 2.0, 3.0])

        with pytest.raises(ValueError):
            f.values[0] = 5.0

    def test_field_from_other_measure_rejected(self, three_point_measure, uniform_measure):
        """Test that fields are tied to their measure."""
        f = ScalarField.on(uniform_measure, np.zeros(uniform_measure.size))
        other = PointMeasure.from_arrays([0.0, 0.5, 1.0], [1.0, 1.0, 1.0])

        with pytest.raises(ValueError):
            field_values(f, other)
        with pytest.raises(ValueError):
            field_values(ScalarField.on(other, [1.0, 2.0, 3.0]), three_point_measure)
        assert field_values([1.0, 2.0, 3.0], three_point_measure).tolist() == [1.0, 2.0, 3.0]


class TestMeasureFiles:
    """Test cases for measure and field files."""

    def test_json_round_trip(self, three_point_measure, temp_dir):
        """Test saving and loading a measure as JSON."""
        path = temp_dir / "measure.json"
        save_measure(three_point_measure, path)

        loaded = load_measure(path)

        assert loaded.measure_id == three_point_measure.measure_id

    def test_csv_measure(self, temp_dir):
        """Test loading a CSV measure with a weight column."""
        path = temp_dir / "measure.csv"
        path.write_text("x,weight\n0.0,0.5\n1.0,0.25\n")

        mu = load_measure(path)

        assert mu.size == 2
        assert mu.weights.tolist() == pytest.approx([0.5, 0.25])

    def test_declared_dimension_checked(self, temp_dir):
        """Test that a wrong declared dimension raises."""
        path = temp_dir / "measure.json"
        path.write_text(json.dumps({"dim": 2, "points": [0.0, 1.0], "weights": [1.0, 1.0]}))

        with pytest.raises(ValueError):
            load_measure(path)

    def test_missing_file(self, temp_dir):
        """Test that a missing measure file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            load_measure(temp_dir / "absent.json")

    def test_field_files(self, three_point_measure, temp_dir):
        """Test JSON and CSV field files."""
        f = ScalarField.on(three_point_measure, [1.0, -2.0, 0.5])
        for name in ("f.json", "f.csv"):
            save_field(f, temp_dir / name)
            assert load_field(temp_dir / name, three_point_measure).values.tolist() == [1.0, -2.0, 0.5]

    def test_field_wrong_length(self, three_point_measure, temp_dir):
        """Test that a field file of the wrong length raises."""
        path = temp_dir / "f.json"
        path.write_text("[1.0, 2.0]")

        with pytest.raises(ValueError):
            load_field(path, three_point_measure)
