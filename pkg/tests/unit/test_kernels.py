"""
Unit tests for Calderón-Zygmund kernels and the kernel registry.
"""

import json

import numpy as np
import pytest

from dyadic_rbmo.kernels import (
    KERNEL_REGISTRY, CauchyKernel, RieszKernel, TableKernel, kernel_conditions, parse_kernel_flag,
)
from dyadic_rbmo.utils.corpus import resolve_measure


class TestCauchyKernel:
    """Test cases for CauchyKernel."""

    def test_antisymmetric_with_zero_diagonal(self, uniform_measure):
        """Test k(x, y) = -k(y, x) and k(x, x) = 0."""
        K = CauchyKernel().matrix(uniform_measure)

        assert np.allclose(K, -K.T)
        assert np.all(np.diag(K) == 0)

    def test_size_constant_is_one(self, uniform_measure):
        """Test that |k(x, y)| |x - y| = 1 on every pair."""
        conditions = kernel_conditions(CauchyKernel(), uniform_measure)

        assert conditions.size_constant == pytest.approx(1.0)
        assert conditions.lipschitz_samples > 0
        assert np.isfinite(conditions.lipschitz_ratio)

    def test_truncation(self, uniform_measure):
        """Test that pairs closer than epsilon are cut."""
        K = CauchyKernel(epsilon=0.1).matrix(uniform_measure)
        close = (uniform_measure.distances < 0.1)

        assert np.all(K[close] == 0)
        assert np.all(K[~close] != 0)

    def test_negative_epsilon_rejected(self):
        """Test that a negative truncation radius raises."""
        with pytest.raises(ValueError):
            CauchyKernel(epsilon=-1.0)

    def test_planar_real_part(self):
        """Test the planar kernel (x1 - y1) / |x - y|^2."""
        mu = resolve_measure("builtin:uniform2d:4")
        K = CauchyKernel().matrix(mu)
        diff = mu.points[:, None, :] - mu.points[None, :, :]
        dist2 = np.einsum("ijk,ijk->ij", diff, diff)
        np.fill_diagonal(dist2, 1.0)
        expected = diff[:, :, 0] / dist2
        np.fill_diagonal(expected, 0.0)

        assert np.allclose(K, expected)


class TestRieszKernel:
    """Test cases for RieszKernel."""

    def test_matches_cauchy_on_the_line(self, uniform_measure):
        """Test that the one-dimensional Riesz kernel is the Cauchy kernel."""
        assert np.allclose(RieszKernel(0).matrix(uniform_measure), CauchyKernel().matrix(uniform_measure))

    def test_component_out_of_range(self, uniform_measure):
        """Test that a component beyond the dimension raises."""
        with pytest.raises(ValueError):
            RieszKernel(1).matrix(uniform_measure)

    def test_spec_records_component(self, uniform_measure):
        """Test the reporting view."""
        spec = RieszKernel(0, epsilon=0.01).spec(uniform_measure)

        assert spec.kind == "riesz"
        assert spec.component == 0
        assert spec.epsilon == 0.01


class TestTableKernel:
    """Test cases for TableKernel."""

    def test_json_table(self, three_point_measure, temp_dir):
        """Test loading a JSON table; the diagonal is zeroed."""
        path = temp_dir / "kernel.json"
        path.write_text(json.dumps([[5.0, 1.0, 2.0], [1.0, 5.0, 3.0], [2.0, 3.0, 5.0]]))

        K = TableKernel.from_file(path).matrix(three_point_measure)

        assert np.all(np.diag(K) == 0)
        assert K[0, 2] == 2.0

    def test_csv_table(self, three_point_measure, temp_dir):
        """Test loading a headerless CSV table."""
        path = temp_dir / "kernel.csv"
        path.write_text("0,1,2\n1,0,3\n2,3,0\n")

        assert TableKernel.from_file(path).matrix(three_point_measure)[1, 2] == 3.0

    def test_shape_checked(self, uniform_measure):
        """Test that a table must be square and match the measure."""
        with pytest.raises(ValueError):
            TableKernel(np.zeros((2, 3)))
        with pytest.raises(ValueError):
            TableKernel(np.zeros((3, 3))).matrix(uniform_measure)


class TestKernelFlag:
    """Test cases for parse_kernel_flag."""

    def test_builtin_flags(self):
        """Test cauchy, riesz and riesz:<j>."""
        assert isinstance(parse_kernel_flag("cauchy"), CauchyKernel)
        assert parse_kernel_flag("riesz").component == 0
        assert parse_kernel_flag("riesz:1").component == 1

    def test_epsilon_forwarded(self):
        """Test that the truncation radius reaches the kernel."""
        assert parse_kernel_flag("cauchy", epsilon=0.2).epsilon == 0.2

    @pytest.mark.parametrize("flag", ["hilbert", "riesz:x", ""])
    def test_unknown_flags(self, flag):
        """Test that unknown kernels raise ValueError."""
        with pytest.raises(ValueError):
            parse_kernel_flag(flag)

    def test_missing_custom_file(self, temp_dir):
        """Test that a missing custom table raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            parse_kernel_flag(f"custom:{temp_dir / 'absent.json'}")

    def test_registry_names(self):
        """Test the registered kernel names."""
        assert set(KERNEL_REGISTRY) == {"cauchy", "riesz", "custom"}
