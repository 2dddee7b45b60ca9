"""
Unit tests for the RBMO_Σ, Tolsa RBMO and H¹_Σ norms, atomic blocks and the
John-Nirenberg tables.
"""

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from dyadic_rbmo.core.filtration import cond_exp
from dyadic_rbmo.core.measure import doubling_mask
from dyadic_rbmo.spaces import (
    AtomicBlock, TolsaEvaluator, block_constant_report, duality_report, greedy_atomic_block, h1_sigma_norm,
    inclusion_ratio, john_nirenberg_report, norm_bundle, p_equivalence_report, rbmo_sigma_norm,
    rbmo_tolsa_norm, square_function, validate_atomic_block,
)
from dyadic_rbmo.utils.corpus import resolve_measure

fixture_settings = settings(
    max_examples=20, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture]
)


class TestRBMOSigmaNorm:
    """Test cases for rbmo_sigma_norm."""

    def test_constant_field_has_zero_norm(self, filtration):
        """Test that constants have norm zero."""
        ones = np.ones(filtration.measure.size)

        assert rbmo_sigma_norm(filtration, ones).norm_value == 0.0
        assert rbmo_sigma_norm(filtration, ones, 2.0).norm_value == 0.0

    @given(st.floats(min_value=-100, max_value=100), st.floats(min_value=-5, max_value=5))
    @fixture_settings
    def test_translation_and_homogeneity(self, filtration, fields, c, a):
        """Test ||af + c|| = |a| ||f||."""
        base = rbmo_sigma_norm(filtration, fields[0]).norm_value
        moved = rbmo_sigma_norm(filtration, a * fields[0].values + c).norm_value

        assert moved == pytest.approx(abs(a) * base, rel=1e-8, abs=1e-9 * (1 + abs(c)))

    def test_witness_attains_norm(self, filtration, fields):
        """Test that the witness atom carries the reported oscillation."""
        report = rbmo_sigma_norm(filtration, fields[0], 2.0)
        atom = report.witness["atom"]

        assert report.witness["level"] == filtration.level_of[atom]
        assert report.variant == "rbmo_sigma_p2"
        assert not report.experimental

    def test_exponent_checks(self, filtration, fields):
        """Test that p < 1 raises and p outside {1, 2} is experimental."""
        with pytest.raises(ValueError):
            rbmo_sigma_norm(filtration, fields[0], 0.5)

        assert rbmo_sigma_norm(filtration, fields[0], 4.0).experimental

    def test_norms_increase_with_p(self, filtration, fields):
        """Test that the p-norms are nondecreasing in p."""
        report = p_equivalence_report(filtration, fields[0], (1.0, 2.0, 4.0))

        assert report["monotone"]
        assert report["ratios"]["1"] == pytest.approx(1.0)
        assert report["norms"]["1"] <= report["norms"]["2"] + 1e-12


class TestTolsaNorm:
    """Test cases for the Tolsa RBMO norm."""

    def test_constant_field(self, uniform_measure):
        """Test that constants have Tolsa norm zero."""
        result = rbmo_tolsa_norm(uniform_measure, np.ones(uniform_measure.size), 16.0)

        assert result.norm_value == 0.0

    def test_max_of_parts(self, uniform_measure, fields):
        """Test value = max(star, d)."""
        result = TolsaEvaluator(uniform_measure, 16.0).norm(fields[0])

        assert result["value"] == max(result["star"], result["d"])
        assert result["variant"] == "tolsa"

    def test_concentric_variant(self, uniform_measure, fields):
        """Test that the concentric fallback keeps the star part and restricts only the pairs."""
        exact = TolsaEvaluator(uniform_measure, 16.0, exact=True).norm(fields[0])
        concentric = TolsaEvaluator(uniform_measure, 16.0, exact=False).norm(fields[0])

        assert concentric["variant"] != exact["variant"]
        assert concentric["star"] == pytest.approx(exact["star"], rel=1e-12, abs=1e-15)
        assert concentric["d"] <= exact["d"] + 1e-12

    def test_star_part_exact_on_large_measure(self):
        """Test that above the exact-size limit the star part is still the sup over all doubling balls."""
        mu = resolve_measure("builtin:gaussian:256")
        values = np.random.default_rng(5).standard_normal(mu.size)
        family = mu.canonical_balls(2.0)
        expected = 0.0
        for center in range(mu.size):
            radii = family.radii[family.centers == center]
            radii = radii[doubling_mask(mu.mass_at(center, radii), mu.mass_at(center, 2.0 * radii), 16.0)]
            inside = mu.distances[center][None, :] <= radii[:, None] * (1.0 + 1e-12)
            masses = inside.astype(float) @ mu.weights
            averages = (inside.astype(float) @ (values * mu.weights)) / masses
            spread = (inside * np.abs(values[None, :] - averages[:, None]) * mu.weights[None, :]).sum(axis=1)
            expected = max(expected, float(np.max(spread / masses)))

        result = TolsaEvaluator(mu, 16.0).norm(values)

        assert result["variant"] == "tolsa-concentric"
        assert result["star"] == pytest.approx(expected, rel=1e-9)

    def test_inclusion_ratio(self, filtration, fields):
        """Test that the inclusion ratio is finite and positive on random fields."""
        ratio, witness = inclusion_ratio(filtration, fields)

        assert 0 < ratio < np.inf
        assert witness["field"] in range(len(fields))

    def test_inclusion_ratio_constant_fields(self, filtration):
        """Test that a corpus of constants raises."""
        size = filtration.measure.size
        with pytest.raises(ValueError):
            inclusion_ratio(filtration, [np.zeros(size), np.ones(size)])


class TestHardySpace:
    """Test cases for the square function, H¹_Σ and duality."""

    def test_square_function_ignores_mean(self, filtration, fields):
        """Test that S f only sees f - E_0 f."""
        f = fields[0].values
        centered = f - cond_exp(filtration, f, 0).values

        assert np.allclose(square_function(filtration, f), square_function(filtration, centered))

    def test_h1_norm_of_constant(self, filtration):
        """Test that constants have zero H¹_Σ norm."""
        assert h1_sigma_norm(filtration, np.full(filtration.measure.size, 3.0)) == pytest.approx(0.0, abs=1e-12)

    def test_duality_skips_degenerate_pairs(self, filtration, fields):
        """Test that pairs with a zero norm are skipped."""
        ones = np.ones(filtration.measure.size)
        report = duality_report(filtration, [(fields[0], fields[1]), (fields[2], ones)])

        assert report["pairs"] == 1
        assert report["max_ratio"] > 0

    def test_norm_bundle(self, filtration, fields):
        """Test the keys of the norms artifact record."""
        bundle = norm_bundle(filtration, fields[0])

        assert set(bundle) == {"rbmo_sigma_p1", "rbmo_sigma_p2", "rbmo_tolsa", "h1_sigma"}
        assert bundle["rbmo_sigma_p1"]["norm_value"] <= bundle["rbmo_sigma_p2"]["norm_value"] + 1e-12


class TestAtomicBlocks:
    """Test cases for atomic blocks."""

    def test_greedy_block_is_valid(self, filtration, fields):
        """Test that the greedy block validates and rebuilds f - E_0 f."""
        f = fields[0].values
        block = greedy_atomic_block(filtration, f)
        check = validate_atomic_block(filtration, block)

        assert check.valid, check.reason
        assert np.allclose(block.evaluate(), f - cond_exp(filtration, f, 0).values)

    def test_block_constant_report(self, filtration, fields):
        """Test the H¹_Σ-to-block ratio over greedy blocks."""
        report = block_constant_report(filtration, [greedy_atomic_block(filtration, f) for f in fields])

        assert report["invalid"] == []
        assert 0 < report["max_ratio"] < np.inf

    def test_rejection_reasons(self, filtration):
        """Test each rejection reason."""
        size = filtration.measure.size
        child = filtration.levels[1][0]
        members = filtration.cube(child).members
        mass = float(filtration.measure.weights[members].sum())
        chi = np.zeros(size)
        chi[members] = 1.0

        cases = {
            "support": AtomicBlock(0, [1.0], [np.ones(size)], [child]),
            "level": AtomicBlock(2, [1.0], [chi], [filtration.root], [0]),
            "exponent": AtomicBlock(0, [1.0], [chi], [child], p=1.0),
            "size": AtomicBlock(0, [1.0], [chi * 100.0 / mass], [child]),
            "cancellation": AtomicBlock(0, [1.0], [chi * 0.25 / mass], [child]),
            "length": AtomicBlock(0, [1.0, 2.0], [chi], [child]),
        }
        for reason, block in cases.items():
            check = validate_atomic_block(filtration, block)
            assert not check.valid
            assert check.reason == reason

    def test_empty_block(self, filtration):
        """Test that the empty block is valid with value zero."""
        assert validate_atomic_block(filtration, AtomicBlock(0, [], [], [])).valid


class TestJohnNirenberg:
    """Test cases for the John-Nirenberg tables."""

    def test_decay_is_monotone(self, filtration, fields):
        """Test that the level-set ratios do not increase with t."""
        report = john_nirenberg_report(filtration, fields[0])
        ratios = [row["ratio"] for row in report.rows]

        assert all(b <= a for a, b in zip(ratios, ratios[1:]))
        assert len(report.csv_rows()) == len(report.rows)

    def test_zero_norm_rejected(self, filtration):
        """Test that a constant field raises."""
        with pytest.raises(ValueError):
            john_nirenberg_report(filtration, np.ones(filtration.measure.size))

    def test_rate_fitted(self, gaussian_filtration, gaussian_measure, rng):
        """Test that a nondegenerate table carries a fitted rate."""
        report = john_nirenberg_report(gaussian_filtration, rng.standard_normal(gaussian_measure.size))

        if not report.degenerate:
            assert report.rate is not None
            assert report.intercept is not None
